#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcdma/errors.hpp"
#include "qcdma/optics.hpp"

namespace qcdma::entangle {

/// Dispersive qubit-cavity coupling parameters. The pointer phase
/// phi = 2*g^2*tau'/Delta is the only quantity the pipeline consumes.
struct DispersiveCoupling {
    double cavity_freq = 0.0;      ///< omega_c [rad/s]
    double qubit_freq = 0.0;       ///< omega_q [rad/s]
    double coupling = 0.0;         ///< g [rad/s]
    double interaction_time = 0.0; ///< tau' [s]
    double dispersive_ratio = 10.0;///< validity guard: |Delta| >= ratio*|g|

    double detuning() const { return cavity_freq - qubit_freq; }
    double shift() const { return coupling * coupling / detuning(); }
    double pointer_phase() const { return 2.0 * shift() * interaction_time; }
    void validate() const;
};

enum class MeasurementModel : std::uint8_t { IdealizedOrthogonal, CoherentProjection };

MeasurementModel parse_measurement_model(const std::string& name);
std::string to_string(MeasurementModel m);

/// One superposition branch: a qubit configuration, its coefficient, and a
/// coherent amplitude for every tracked mode.
struct Branch {
    std::vector<std::uint8_t> qubits; ///< 0 = g, 1 = e, aligned with qubit ids
    std::complex<double> coeff;
    std::vector<std::complex<double>> modes; ///< aligned with mode ids
};

/// Superposition of qubit-configuration branches with per-mode coherent
/// amplitudes. Branches with distinct field amplitudes are non-orthogonal,
/// so the norm is Gram-weighted with coherent overlaps.
class BranchState {
public:
    BranchState() = default;

    const std::vector<int>& qubit_ids() const { return qubit_ids_; }
    const std::vector<int>& mode_ids() const { return mode_ids_; }
    const std::vector<Branch>& branches() const { return branches_; }
    std::vector<Branch>& branches() { return branches_; }

    std::size_t qubit_index(int qubit_id) const; ///< throws ConfigError when unknown
    std::size_t mode_index(int mode_id) const;   ///< throws ConfigError when unknown

    /// Gram-weighted squared norm <psi|psi>.
    double norm() const;

    /// Divides all coefficients by sqrt(norm()).
    void normalize();

    friend BranchState prepare_plus(int n_qubits);
    friend BranchState attach_probe(const BranchState& state, int mode_id,
                                    optics::CoherentAmplitude alpha);
    friend BranchState drop_mode(const BranchState& state, std::size_t mode_pos);

private:
    std::vector<int> qubit_ids_;
    std::vector<int> mode_ids_;
    std::vector<Branch> branches_;
};

/// Uniform product state (|g>+|e>)/sqrt2 per qubit; ids 1..n, no modes.
BranchState prepare_plus(int n_qubits);

/// Adds a mode in the coherent state |alpha> to every branch.
BranchState attach_probe(const BranchState& state, int mode_id, optics::CoherentAmplitude alpha);

/// Conditional pointer rotation: |g>|a> -> |g>|a e^{-i phi/2}>,
/// |e>|a> -> |e>|a e^{+i phi/2}>. Coefficients unchanged (branch-global
/// dynamical phases dropped).
BranchState dispersive_interact(const BranchState& state, int qubit_id, int mode_id, double phi);

/// Applies optics::network_transfer to the (mode_a, mode_b) amplitude pair
/// of every branch. Cross terms sqrt(M1*M2) are kept.
BranchState propagate_network(const BranchState& state, int mode_a, int mode_b,
                              const optics::NetworkFactors& f);

struct MeasurementOutcome {
    std::size_t index = 0;      ///< position in the outcome list
    double probability = 0.0;   ///< normalized over the outcome set
    BranchState state;          ///< conditional state, normalized
};

/// Deterministic variant: conditional states and probabilities for every
/// pointer outcome, normalized over the outcome set.
std::vector<MeasurementOutcome> measure_pointer_all(const BranchState& state, int mode_id,
                                                    const std::vector<optics::CoherentAmplitude>& outcomes,
                                                    MeasurementModel model);

/// Samples one outcome with the seeded generator.
MeasurementOutcome measure_pointer(const BranchState& state, int mode_id,
                                   const std::vector<optics::CoherentAmplitude>& outcomes,
                                   MeasurementModel model, std::uint64_t seed);

/// Conditional 4x4 state of a qubit pair, basis {gg, ge, eg, ee}.
struct TwoQubitDensityMatrix {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();

    void validate(double tol = 1e-10) const; ///< Hermitian, PSD, unit trace
};

/// Partial trace onto (qubit_a, qubit_b); remaining qubits are traced over
/// their basis and leftover field overlaps are applied.
TwoQubitDensityMatrix reduced_density(const BranchState& state, int qubit_a, int qubit_b);

enum class BellTarget : std::uint8_t { PsiPlus }; ///< (|ge>+|eg>)/sqrt2

/// <target|rho|target>.
double fidelity(const TwoQubitDensityMatrix& rho, BellTarget target);

struct DistributeConfig {
    double nbar = 10.0;   ///< mean photon number of each probe
    double phi = M_PI / 3.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double eta = 0.0;
    MeasurementModel model = MeasurementModel::CoherentProjection;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DistributeResult {
    double f1 = 0.0;
    double f2 = 0.0;
    double p_success = 0.0; ///< joint success probability over the 3x3 pointer set
    TwoQubitDensityMatrix rho13;
    TwoQubitDensityMatrix rho24;
    DistributeConfig config;
};

/// Full pipeline: prepare -> attach -> interact(1,2) -> network ->
/// interact(3,4) -> joint pointer measurement conditioned on both arms
/// reading the success pointer sqrt(1-eta)*alpha/2.
DistributeResult distribute(const DistributeConfig& cfg);

/// Result record serialization (JSON; density matrices as row-major
/// [re, im] pair arrays).
std::string to_json(const DistributeResult& r);

} // namespace qcdma::entangle
