#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qcdma/errors.hpp"

namespace qcdma::chaos {

enum class TransistorModel : std::uint8_t {
    PiecewiseLinear, ///< I_E = Gon * max(0, -v_c2 - Vth)
    Exponential      ///< I_E = Gon * Vt_th * (exp((-v_c2 - Vth)/Vt_th) - ...), smooth variant
};

/// Component values of the single-transistor Colpitts oscillator.
/// The tank is L in series with R from the supply to the collector;
/// C1 sits between collector and emitter, C2 between emitter and ground,
/// and an ideal current source I0 biases the emitter.
struct CircuitParams {
    double resistance = 27.99;       ///< R [ohm]
    double inductance = 17.5e-9;     ///< L [H]
    double c1 = 13.1e-12;            ///< C1 [F]
    double c2 = 12.7e-12;            ///< C2 [F]
    double vcc = 15.0;               ///< supply [V]
    double bias_current = 12.0e-3;   ///< I0 [A]
    double threshold = 0.75;         ///< Vth [V]
    double on_conductance = 0.376;   ///< Gon [S]
    TransistorModel model = TransistorModel::PiecewiseLinear;

    void validate() const; ///< throws ConfigError on bad values
};

/// Circuit state: voltage across C1 (collector-emitter), voltage across C2
/// (emitter node), and the inductor current.
struct CircuitState {
    double v_c1 = 0.0; ///< [V]
    double v_c2 = 0.0; ///< [V]
    double i_l = 0.0;  ///< [A]

    bool finite() const noexcept;
};

/// Uniformly sampled state sequence.
struct Trajectory {
    double t0 = 0.0; ///< [s]
    double dt = 0.0; ///< [s]
    std::vector<CircuitState> samples;

    std::size_t size() const noexcept { return samples.size(); }
    double time_at(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }
};

/// Emitter current of the transistor model at base-emitter voltage -v_c2.
double emitter_current(const CircuitParams& p, double v_c2);

/// Time derivative (dv_c1/dt, dv_c2/dt, di_l/dt) of the oscillator.
CircuitState vector_field(const CircuitParams& p, const CircuitState& s);

/// Jacobian of the vector field at s, row-major [dv1,dv2,di][v1,v2,i].
std::array<double, 9> jacobian(const CircuitParams& p, const CircuitState& s);

/// Resonance frequency of the linearized LC tank, 1/(2*pi*sqrt(L*C1C2/(C1+C2))) [Hz].
double resonance_frequency(const CircuitParams& p);

/// Equilibrium of the active region (i_l = I0) in closed form.
CircuitState equilibrium(const CircuitParams& p);

/// Integration bounding box: |v| <= 10*Vcc, |i_l| <= 10*Vcc/R.
bool inside_bounding_box(const CircuitParams& p, const CircuitState& s);

/// Fixed-step explicit RK4. Returns n+1 samples starting at init.
/// Requires dt <= 1/(100*f0). Throws DivergenceError when the state leaves
/// the bounding box.
Trajectory integrate(const CircuitParams& p, const CircuitState& init, double dt,
                     std::size_t n, double t0 = 0.0);

struct LyapunovOptions {
    double transient_time = 2e-6;     ///< [s] discarded before accumulation
    double total_time = 40e-6;        ///< [s] accumulation window
    double renorm_interval = 1e-9;    ///< [s] Gram-Schmidt re-orthonormalization
    double dt = 0.0;                  ///< step; 0 selects 1/(200*f0)
};

/// Full Lyapunov spectrum via Benettin tangent-space evolution,
/// sorted descending [1/s].
std::array<double, 3> lyapunov_spectrum(const CircuitParams& p, const CircuitState& init,
                                        const LyapunovOptions& opts = {});

/// Conditional (sub-)Lyapunov exponents of the (v_c2, i_l) response
/// subsystem under a v_c1 drive, sorted descending [1/s].
std::array<double, 2> conditional_exponents(const CircuitParams& p);

/// Nominal bandwidth of the reference (default) configuration [Hz].
inline constexpr double kReferenceBandwidthHz = 500e6;

/// Rescales L, C1 and C2 by the common factor f_ref/target_bw, which
/// rescales time only: the dimensionless dynamics are unchanged and the
/// spectral support moves linearly with target_bw.
CircuitParams scale_to_bandwidth(const CircuitParams& p, double target_bw_hz,
                                 double reference_bw_hz = kReferenceBandwidthHz);

/// Pecora-Carroll receiver: integrates a copy of the circuit whose v_c1 is
/// replaced by the drive sample at the start of every step. drive holds the
/// transmitter v_c1 at the receiver integration step dt.
Trajectory pecora_carroll_receive(const CircuitParams& p, const std::vector<double>& drive,
                                  double dt, const CircuitState& init, double t0 = 0.0);

struct SyncError {
    std::vector<double> trace;   ///< pointwise |v_c2 - v_c2~|
    double max_after_transient;  ///< supremum over samples past the transient
};

/// Pointwise v_c2 error between transmitter and receiver trajectories.
/// Requires equal dt and length.
SyncError sync_error(const Trajectory& tx, const Trajectory& rx, double transient_time);

/// CSV export, columns t,v_c1,v_c2,i_l (shortest round-trip doubles).
void write_csv(std::ostream& os, const Trajectory& traj);

} // namespace qcdma::chaos
