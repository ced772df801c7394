#include "qcdma/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "qcdma/csv.hpp"

namespace qcdma::entangle {

namespace {

using optics::CoherentAmplitude;
using optics::coherent_overlap;
using Complex = std::complex<double>;

// Product of per-mode overlaps <modes(a)|modes(b)> for two branches.
Complex field_overlap(const Branch& a, const Branch& b) {
    Complex acc{1.0, 0.0};
    for (std::size_t m = 0; m < a.modes.size(); ++m)
        acc *= coherent_overlap(a.modes[m], b.modes[m]);
    return acc;
}

// Unnormalized projection of one mode onto a pointer outcome.
BranchState project_mode(const BranchState& state, std::size_t mode_pos,
                         const std::vector<CoherentAmplitude>& outcomes, std::size_t which,
                         MeasurementModel model) {
    BranchState out = drop_mode(state, mode_pos);
    auto& branches = out.branches();
    std::size_t kept = 0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const CoherentAmplitude amp = state.branches()[b].modes[mode_pos];
        if (model == MeasurementModel::CoherentProjection) {
            branches[kept] = branches[b];
            branches[kept].coeff *= coherent_overlap(outcomes[which], amp);
            ++kept;
        } else {
            // bin to the nearest outcome; cross-outcome overlaps are exactly 0
            std::size_t nearest = 0;
            double best = std::abs(amp - outcomes[0]);
            for (std::size_t i = 1; i < outcomes.size(); ++i) {
                const double d = std::abs(amp - outcomes[i]);
                if (d < best) best = d, nearest = i;
            }
            if (nearest == which) branches[kept++] = branches[b];
        }
    }
    branches.resize(kept);
    return out;
}

void require_distinct(const std::vector<CoherentAmplitude>& outcomes) {
    if (outcomes.empty()) throw ConfigError("measure_pointer: empty outcome list");
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        for (std::size_t j = i + 1; j < outcomes.size(); ++j)
            if (std::abs(outcomes[i] - outcomes[j]) == 0.0)
                throw ConfigError("measure_pointer: outcomes must be pairwise distinct");
}

} // namespace

void DispersiveCoupling::validate() const {
    if (!(cavity_freq > 0 && qubit_freq > 0 && coupling > 0 && interaction_time > 0))
        throw ConfigError("DispersiveCoupling: frequencies, g and tau' must be positive");
    if (std::abs(detuning()) < dispersive_ratio * std::abs(coupling))
        throw ConfigError("DispersiveCoupling: |Delta| >= ratio*|g| dispersive guard violated");
    const double phi = pointer_phase();
    if (!(phi > 0 && phi < M_PI))
        throw ConfigError("DispersiveCoupling: pointer phase must lie in (0, pi)");
}

MeasurementModel parse_measurement_model(const std::string& name) {
    if (name == "idealized-orthogonal") return MeasurementModel::IdealizedOrthogonal;
    if (name == "coherent-projection") return MeasurementModel::CoherentProjection;
    throw ConfigError("unknown measurement model: " + name);
}

std::string to_string(MeasurementModel m) {
    return m == MeasurementModel::IdealizedOrthogonal ? "idealized-orthogonal"
                                                      : "coherent-projection";
}

std::size_t BranchState::qubit_index(int qubit_id) const {
    const auto it = std::find(qubit_ids_.begin(), qubit_ids_.end(), qubit_id);
    if (it == qubit_ids_.end())
        throw ConfigError("unknown qubit id " + std::to_string(qubit_id));
    return static_cast<std::size_t>(it - qubit_ids_.begin());
}

std::size_t BranchState::mode_index(int mode_id) const {
    const auto it = std::find(mode_ids_.begin(), mode_ids_.end(), mode_id);
    if (it == mode_ids_.end()) throw ConfigError("unknown mode id " + std::to_string(mode_id));
    return static_cast<std::size_t>(it - mode_ids_.begin());
}

double BranchState::norm() const {
    Complex acc{0.0, 0.0};
    for (const Branch& a : branches_)
        for (const Branch& b : branches_) {
            if (a.qubits != b.qubits) continue;
            acc += std::conj(a.coeff) * b.coeff * field_overlap(a, b);
        }
    return acc.real();
}

void BranchState::normalize() {
    const double n = std::sqrt(norm());
    if (!(n > 0)) throw ConfigError("BranchState: cannot normalize zero state");
    for (Branch& b : branches_) b.coeff /= n;
}

BranchState prepare_plus(int n_qubits) {
    if (n_qubits < 1) throw ConfigError("prepare_plus: need at least one qubit");
    BranchState st;
    st.qubit_ids_.resize(static_cast<std::size_t>(n_qubits));
    for (int q = 0; q < n_qubits; ++q) st.qubit_ids_[static_cast<std::size_t>(q)] = q + 1;

    const std::size_t count = std::size_t{1} << n_qubits;
    const double coeff = std::pow(2.0, -0.5 * n_qubits);
    st.branches_.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        Branch b;
        b.qubits.resize(static_cast<std::size_t>(n_qubits));
        for (int q = 0; q < n_qubits; ++q)
            b.qubits[static_cast<std::size_t>(q)] = (mask >> q) & 1u;
        b.coeff = coeff;
        st.branches_.push_back(std::move(b));
    }
    return st;
}

BranchState attach_probe(const BranchState& state, int mode_id, CoherentAmplitude alpha) {
    if (std::find(state.mode_ids_.begin(), state.mode_ids_.end(), mode_id) !=
        state.mode_ids_.end())
        throw ConfigError("attach_probe: duplicate mode id " + std::to_string(mode_id));
    BranchState out = state;
    out.mode_ids_.push_back(mode_id);
    for (Branch& b : out.branches_) b.modes.push_back(alpha);
    return out;
}

BranchState drop_mode(const BranchState& state, std::size_t mode_pos) {
    BranchState out = state;
    out.mode_ids_.erase(out.mode_ids_.begin() + static_cast<std::ptrdiff_t>(mode_pos));
    for (Branch& b : out.branches_)
        b.modes.erase(b.modes.begin() + static_cast<std::ptrdiff_t>(mode_pos));
    return out;
}

BranchState dispersive_interact(const BranchState& state, int qubit_id, int mode_id, double phi) {
    const std::size_t q = state.qubit_index(qubit_id);
    const std::size_t m = state.mode_index(mode_id);
    BranchState out = state;
    for (Branch& b : out.branches()) {
        const double sign = b.qubits[q] ? +1.0 : -1.0;
        b.modes[m] *= std::polar(1.0, sign * phi / 2.0);
    }
    return out;
}

BranchState propagate_network(const BranchState& state, int mode_a, int mode_b,
                              const optics::NetworkFactors& f) {
    const std::size_t ia = state.mode_index(mode_a);
    const std::size_t ib = state.mode_index(mode_b);
    BranchState out = state;
    for (Branch& b : out.branches()) {
        const auto [a3, a4] = optics::network_transfer(b.modes[ia], b.modes[ib], f);
        b.modes[ia] = a3;
        b.modes[ib] = a4;
    }
    return out;
}

std::vector<MeasurementOutcome> measure_pointer_all(const BranchState& state, int mode_id,
                                                    const std::vector<CoherentAmplitude>& outcomes,
                                                    MeasurementModel model) {
    require_distinct(outcomes);
    const std::size_t pos = state.mode_index(mode_id);

    std::vector<MeasurementOutcome> all;
    all.reserve(outcomes.size());
    double total = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        MeasurementOutcome o;
        o.index = i;
        o.state = project_mode(state, pos, outcomes, i, model);
        o.probability = o.state.norm(); // unnormalized weight for now
        total += o.probability;
        all.push_back(std::move(o));
    }
    if (!(total > 0)) throw ConfigError("measure_pointer: all outcomes have zero weight");
    if (model == MeasurementModel::IdealizedOrthogonal) {
        // binning is exhaustive, so the weights must already sum to the norm
        if (std::abs(total - state.norm()) > 1e-6 * state.norm())
            throw ConfigError("measure_pointer: idealized outcome probabilities do not sum to 1");
    }
    for (auto& o : all) {
        o.probability /= total;
        if (o.probability > 0) o.state.normalize();
    }
    return all;
}

MeasurementOutcome measure_pointer(const BranchState& state, int mode_id,
                                   const std::vector<CoherentAmplitude>& outcomes,
                                   MeasurementModel model, std::uint64_t seed) {
    auto all = measure_pointer_all(state, mode_id, outcomes, model);
    std::mt19937_64 rng(seed);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (auto& o : all) {
        acc += o.probability;
        if (u <= acc) return std::move(o);
    }
    return std::move(all.back());
}

void TwoQubitDensityMatrix::validate(double tol) const {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw ConfigError("TwoQubitDensityMatrix: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol)
        throw ConfigError("TwoQubitDensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw ConfigError("TwoQubitDensityMatrix: negative eigenvalue");
}

TwoQubitDensityMatrix reduced_density(const BranchState& state, int qubit_a, int qubit_b) {
    const std::size_t ia = state.qubit_index(qubit_a);
    const std::size_t ib = state.qubit_index(qubit_b);

    TwoQubitDensityMatrix rho;
    const auto& branches = state.branches();
    for (const Branch& x : branches)
        for (const Branch& y : branches) {
            // traced qubits must match
            bool match = true;
            for (std::size_t q = 0; q < x.qubits.size(); ++q) {
                if (q == ia || q == ib) continue;
                if (x.qubits[q] != y.qubits[q]) { match = false; break; }
            }
            if (!match) continue;
            const int row = 2 * x.qubits[ia] + x.qubits[ib];
            const int col = 2 * y.qubits[ia] + y.qubits[ib];
            rho.m(row, col) += x.coeff * std::conj(y.coeff) * field_overlap(y, x);
        }
    return rho;
}

double fidelity(const TwoQubitDensityMatrix& rho, BellTarget target) {
    rho.validate();
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    switch (target) {
        case BellTarget::PsiPlus:
            psi(1) = 1.0 / std::sqrt(2.0); // |ge>
            psi(2) = 1.0 / std::sqrt(2.0); // |eg>
            break;
    }
    return (psi.adjoint() * rho.m * psi)(0, 0).real();
}

void DistributeConfig::validate() const {
    if (!(nbar > 0)) throw ConfigError("DistributeConfig: nbar must be positive");
    if (!(phi > 0 && phi < M_PI)) throw ConfigError("DistributeConfig: phi must lie in (0, pi)");
    optics::NetworkFactors{m1, m2, eta}.validate();
}

DistributeResult distribute(const DistributeConfig& cfg) {
    cfg.validate();
    const int kModeA = 101, kModeB = 102;
    const CoherentAmplitude alpha{std::sqrt(cfg.nbar), 0.0};
    const optics::NetworkFactors f{cfg.m1, cfg.m2, cfg.eta};

    BranchState st = prepare_plus(4);
    st = attach_probe(st, kModeA, alpha);
    st = attach_probe(st, kModeB, alpha);
    st = dispersive_interact(st, 1, kModeA, cfg.phi);
    st = dispersive_interact(st, 2, kModeB, cfg.phi);
    st = propagate_network(st, kModeA, kModeB, f);
    st = dispersive_interact(st, 3, kModeA, cfg.phi);
    st = dispersive_interact(st, 4, kModeB, cfg.phi);

    const CoherentAmplitude success = std::sqrt(1.0 - cfg.eta) * alpha / 2.0;
    const std::vector<CoherentAmplitude> outcomes{
        success, success * std::polar(1.0, -cfg.phi), success * std::polar(1.0, cfg.phi)};

    // joint 3x3 pointer measurement, normalized over the full outcome set
    const std::size_t posA = st.mode_index(kModeA);
    double total = 0.0, w_success = 0.0;
    BranchState conditional;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        BranchState arm = project_mode(st, posA, outcomes, i, cfg.model);
        const std::size_t posB = arm.mode_index(kModeB);
        for (std::size_t j = 0; j < outcomes.size(); ++j) {
            BranchState both = project_mode(arm, posB, outcomes, j, cfg.model);
            const double w = both.norm();
            total += w;
            if (i == 0 && j == 0) {
                w_success = w;
                conditional = std::move(both);
            }
        }
    }
    if (!(total > 0)) throw ConfigError("distribute: zero total pointer weight");

    conditional.normalize();
    DistributeResult res;
    res.config = cfg;
    res.p_success = w_success / total;
    res.rho13 = reduced_density(conditional, 1, 3);
    res.rho24 = reduced_density(conditional, 2, 4);
    res.f1 = fidelity(res.rho13, BellTarget::PsiPlus);
    res.f2 = fidelity(res.rho24, BellTarget::PsiPlus);
    return res;
}

std::string to_json(const DistributeResult& r) {
    nlohmann::json j;
    j["config"] = {{"nbar", r.config.nbar}, {"phi_rad", r.config.phi},
                   {"m1", r.config.m1},     {"m2", r.config.m2},
                   {"eta", r.config.eta}};
    j["model"] = to_string(r.config.model);
    j["seed"] = r.config.seed;
    j["F1"] = r.f1;
    j["F2"] = r.f2;
    j["p_success"] = r.p_success;
    auto dump = [](const TwoQubitDensityMatrix& rho) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                rows.push_back({rho.m(i, k).real(), rho.m(i, k).imag()});
        return rows;
    };
    j["rho13"] = dump(r.rho13);
    j["rho24"] = dump(r.rho24);
    return j.dump(2);
}

} // namespace qcdma::entangle
