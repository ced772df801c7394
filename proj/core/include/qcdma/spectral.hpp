#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qcdma/errors.hpp"

namespace qcdma::spectral {

/// Electro-optic modulator parameters. The speed of light is a fixed
/// constant, not a field.
struct EomParams {
    double carrier = 1.2153e15;      ///< optical angular frequency [rad/s] (1550 nm)
    double refractive_index = 2.2;   ///< n
    double eo_coefficient = 30.8e-12;///< r [m/V]
    double length = 0.05;            ///< crystal length [m]
    double thickness = 1.3e-5;       ///< electrode gap d [m]
    double round_trip = 7.33e-10;    ///< optical round-trip time tau [s]

    void validate() const;
    /// Voltage-to-detuning gain kappa = -omega n^3 r L / (c d tau) [rad/(s V)].
    double gain() const;
};

/// Uniformly sampled detuning delta(t) [rad/s].
struct SignalTrace {
    double dt = 0.0;
    std::vector<double> values;
};

/// Accumulated phase theta(t) [rad]; theta(0) = 0.
struct PhaseTrace {
    double dt = 0.0;
    std::vector<double> values;
};

/// One-sided power spectral density over angular frequency.
/// Normalized so that the trapezoidal integral over omega approximates the
/// signal variance.
struct PowerSpectrum {
    std::vector<double> omega;   ///< [rad/s], ascending, starts at 0
    std::vector<double> density; ///< [(rad/s)^2 * s/rad]

    /// Trapezoidal integral of the density over the full grid.
    double total_power() const;
};

struct Band {
    double omega_lower = 0.0; ///< [rad/s]
    double omega_upper = 0.0; ///< [rad/s]

    void validate() const; ///< requires 0 < lower < upper
};

enum class Window { Hann, Rectangular };

struct WelchOptions {
    std::size_t segment_length = 65536;
    double overlap = 0.5;
    Window window = Window::Hann;
    bool remove_mean = true;
};

/// delta(t) = gain * V(t). Voltage samples at spacing dt.
SignalTrace detuning_from_voltage(const std::vector<double>& voltage, double dt,
                                  const EomParams& e);

/// Per-channel override of the physical gain (same linear map, explicit kappa).
SignalTrace detuning_from_voltage(const std::vector<double>& voltage, double dt, double gain);

/// Trapezoidal cumulative integral of the detuning; theta(0) = 0.
PhaseTrace accumulate_phase(const SignalTrace& s);

/// Welch averaged-periodogram estimate. The trace is de-meaned first when
/// opts.remove_mean is set (a DC detuning is a deterministic phase ramp, and
/// would blow up the 1/omega^2 correction integrand).
PowerSpectrum estimate_psd(const SignalTrace& s, const WelchOptions& opts = {});

/// Correction factor M = exp(-pi * int_band S(omega)/omega^2 domega),
/// trapezoid on the estimator grid with interpolated band endpoints.
double correction_factor(const PowerSpectrum& spectrum, const Band& band);

/// Time average of exp(i*theta(t)) past the transient.
std::complex<double> empirical_phase_average(const PhaseTrace& theta, double transient_time);

/// Highest frequency at which the PSD is within `rel_db` of its peak [Hz].
double bandwidth_at_level(const PowerSpectrum& spectrum, double rel_db = 20.0);

/// Default Eq.-5 band for a configured circuit bandwidth:
/// [2*pi*lower_frac*bw, 2*pi*upper_frac*bw].
Band band_for_bandwidth(double bandwidth_hz, double lower_frac = 0.05, double upper_frac = 1.0);

/// CSV export `omega_rad_s,S`.
void write_csv(std::ostream& os, const PowerSpectrum& spectrum);
/// CSV export `t,delta`.
void write_csv(std::ostream& os, const SignalTrace& trace);

} // namespace qcdma::spectral
