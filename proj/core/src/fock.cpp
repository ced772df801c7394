#include "qcdma/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcdma::fock {

namespace {

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace

std::size_t FockVector::dim() const {
    std::size_t d = std::size_t{1} << n_qubits;
    for (int c : cutoffs) d *= static_cast<std::size_t>(c);
    return d;
}

double FockVector::norm() const {
    double acc = 0.0;
    for (const Complex& c : amp) acc += std::norm(c);
    return acc;
}

int cutoff_for(double alpha_abs) {
    return static_cast<int>(std::ceil(10.0 * alpha_abs * alpha_abs + 10.0));
}

std::vector<Complex> coherent_coefficients(Complex alpha, int cutoff) {
    if (cutoff < 1) throw ConfigError("coherent_coefficients: cutoff must be >= 1");
    std::vector<Complex> c(static_cast<std::size_t>(cutoff));
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < cutoff; ++n)
        c[static_cast<std::size_t>(n)] =
            c[static_cast<std::size_t>(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
    double norm = 0.0;
    for (const Complex& x : c) norm += std::norm(x);
    if (std::abs(norm - 1.0) > 1e-8)
        throw ConfigError("coherent_coefficients: cutoff too small (norm deficit " +
                          std::to_string(1.0 - norm) + ")");
    return c;
}

FockVector coherent_fock(Complex alpha, int cutoff) {
    FockVector v;
    v.n_qubits = 0;
    v.cutoffs = {cutoff};
    v.amp = coherent_coefficients(alpha, cutoff);
    return v;
}

FockVector beamsplitter_fock(const FockVector& state, std::size_t mode_a, std::size_t mode_b,
                             double angle) {
    if (mode_a >= state.cutoffs.size() || mode_b >= state.cutoffs.size() || mode_a == mode_b)
        throw ConfigError("beamsplitter_fock: bad mode indices");
    const int na = state.cutoffs[mode_a];
    const int nb = state.cutoffs[mode_b];
    const double ct = std::cos(angle), st = std::sin(angle);

    // Output coefficients of |m,n> under a -> ct*a + st*b, b -> st*a - ct*b
    // (at angle pi/4 this is Eq.-2 style mixing). Expansion of
    // (ct c^+ + st d^+)^m (st c^+ - ct d^+)^n |00>.
    // Precompute per (m,n) the amplitudes on (j+k, m+n-j-k).
    FockVector out = state;
    std::fill(out.amp.begin(), out.amp.end(), Complex{0.0, 0.0});

    // iterate over all non-mode indices
    std::vector<std::size_t> dims;
    dims.push_back(std::size_t{1} << state.n_qubits);
    for (int c : state.cutoffs) dims.push_back(static_cast<std::size_t>(c));
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size() - 1; i-- > 0;) strides[i] = strides[i + 1] * dims[i + 1];

    const std::size_t sa = strides[mode_a + 1];
    const std::size_t sb = strides[mode_b + 1];

    const std::size_t total = state.dim();
    double leaked = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        const Complex x = state.amp[idx];
        if (x == Complex{0.0, 0.0}) continue;
        const int m = static_cast<int>(idx / sa % static_cast<std::size_t>(na));
        const int n = static_cast<int>(idx / sb % static_cast<std::size_t>(nb));
        const std::size_t base = idx - static_cast<std::size_t>(m) * sa -
                                 static_cast<std::size_t>(n) * sb;
        const double lmn = 0.5 * (log_factorial(m) + log_factorial(n));
        for (int j = 0; j <= m; ++j) {
            for (int k = 0; k <= n; ++k) {
                const int p = j + k;           // photons in output a
                const int q = m + n - j - k;   // photons in output b
                const double mag =
                    std::exp(0.5 * (log_factorial(p) + log_factorial(q)) - lmn +
                             log_factorial(m) - log_factorial(j) - log_factorial(m - j) +
                             log_factorial(n) - log_factorial(k) - log_factorial(n - k));
                const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
                const double coeff = mag * sign * std::pow(ct, j + (n - k)) *
                                     std::pow(st, (m - j) + k);
                if (coeff == 0.0) continue;
                if (p >= na || q >= nb) {
                    leaked += std::norm(x * coeff);
                    continue;
                }
                out.amp[base + static_cast<std::size_t>(p) * sa +
                        static_cast<std::size_t>(q) * sb] += x * coeff;
            }
        }
    }
    if (leaked > 1e-8 * std::max(state.norm(), 1e-300))
        throw ConfigError("beamsplitter_fock: cutoff overflow");
    return out;
}

FockVector dispersive_fock(const FockVector& state, int qubit, std::size_t mode, double phi) {
    if (qubit < 0 || qubit >= state.n_qubits) throw ConfigError("dispersive_fock: bad qubit");
    if (mode >= state.cutoffs.size()) throw ConfigError("dispersive_fock: bad mode");

    std::vector<std::size_t> dims;
    dims.push_back(std::size_t{1} << state.n_qubits);
    for (int c : state.cutoffs) dims.push_back(static_cast<std::size_t>(c));
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size() - 1; i-- > 0;) strides[i] = strides[i + 1] * dims[i + 1];

    const std::size_t sm = strides[mode + 1];
    const int nm = state.cutoffs[mode];
    // qubit bit: qubit 0 is the most significant bit of the configuration
    const int shift = state.n_qubits - 1 - qubit;
    const std::size_t mode_block = state.dim() >> state.n_qubits;

    FockVector out = state;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        const std::size_t cfg = idx / mode_block;
        const int bit = static_cast<int>((cfg >> shift) & 1u);
        const double sign = bit ? +1.0 : -1.0;
        const int n = static_cast<int>(idx / sm % static_cast<std::size_t>(nm));
        out.amp[idx] = state.amp[idx] * std::polar(1.0, sign * phi / 2.0 * n);
    }
    return out;
}

namespace {

// Network amplitude map of Eq.-14 form (vacuum ports dropped).
std::pair<Complex, Complex> network_map(Complex a1, Complex a2, double m1, double m2,
                                        double eta) {
    const double direct = std::sqrt(1.0 - eta) / 2.0;
    const double cross = std::sqrt((1.0 - eta) * m1 * m2) / 2.0;
    return {direct * a1 + cross * a2, direct * a2 + cross * a1};
}

} // namespace

PipelineResult pipeline_fock(const PipelineConfig& cfg) {
    if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0)) throw ConfigError("pipeline_fock: bad eta");
    if (!(cfg.phi > 0.0 && cfg.phi < M_PI)) throw ConfigError("pipeline_fock: bad phi");
    const int n = cutoff_for(std::abs(cfg.alpha));
    const std::size_t nn = static_cast<std::size_t>(n);

    // state[q][m][n], q = (q1 q2 q3 q4) bits, q1 most significant; bit 1 = e
    const std::size_t nq = 16;
    std::vector<Complex> psi(nq * nn * nn);
    {
        const auto ca = coherent_coefficients(cfg.alpha, n);
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t m = 0; m < nn; ++m)
                for (std::size_t k = 0; k < nn; ++k)
                    psi[(q * nn + m) * nn + k] = 0.25 * ca[m] * ca[k];
    }

    auto qubit_sign = [](std::size_t q, int qubit) {
        return ((q >> (3 - qubit)) & 1u) ? +1.0 : -1.0;
    };
    auto dispersive_on = [&](int qubit, int mode, double phi) {
        for (std::size_t q = 0; q < nq; ++q) {
            const double sign = qubit_sign(q, qubit);
            for (std::size_t m = 0; m < nn; ++m)
                for (std::size_t k = 0; k < nn; ++k) {
                    const std::size_t photons = mode == 0 ? m : k;
                    psi[(q * nn + m) * nn + k] *=
                        std::polar(1.0, sign * phi / 2.0 * static_cast<double>(photons));
                }
        }
    };

    dispersive_on(0, 0, cfg.phi); // qubit 1 with probe A
    dispersive_on(1, 1, cfg.phi); // qubit 2 with probe B

    // chaos-averaged network, applied per qubit sector after a coherence audit
    for (std::size_t q = 0; q < nq; ++q) {
        Complex* wf = &psi[q * nn * nn];
        double w = 0.0;
        Complex ea{0, 0}, eb{0, 0};
        for (std::size_t m = 0; m < nn; ++m)
            for (std::size_t k = 0; k < nn; ++k) {
                const Complex x = wf[m * nn + k];
                w += std::norm(x);
                if (m + 1 < nn)
                    ea += std::conj(x) * std::sqrt(static_cast<double>(m + 1)) * wf[(m + 1) * nn + k];
                if (k + 1 < nn)
                    eb += std::conj(x) * std::sqrt(static_cast<double>(k + 1)) * wf[m * nn + k + 1];
            }
        const Complex alpha_a = ea / w;
        const Complex alpha_b = eb / w;

        const auto ca = coherent_coefficients(alpha_a, n);
        const auto cb = coherent_coefficients(alpha_b, n);
        Complex c{0, 0};
        for (std::size_t m = 0; m < nn; ++m)
            for (std::size_t k = 0; k < nn; ++k)
                c += std::conj(ca[m] * cb[k]) * wf[m * nn + k];
        double residual = 0.0;
        for (std::size_t m = 0; m < nn; ++m)
            for (std::size_t k = 0; k < nn; ++k)
                residual += std::norm(wf[m * nn + k] - c * ca[m] * cb[k]);
        if (residual > 1e-10 * w)
            throw ConfigError("pipeline_fock: sector wavefunction is not coherent");

        const auto [a3, a4] = network_map(alpha_a, alpha_b, cfg.m1, cfg.m2, cfg.eta);
        const auto c3 = coherent_coefficients(a3, n);
        const auto c4 = coherent_coefficients(a4, n);
        for (std::size_t m = 0; m < nn; ++m)
            for (std::size_t k = 0; k < nn; ++k)
                wf[m * nn + k] = c * c3[m] * c4[k];
    }

    dispersive_on(2, 0, cfg.phi); // qubit 3 with mode A
    dispersive_on(3, 1, cfg.phi); // qubit 4 with mode B

    // joint 3x3 pointer measurement
    const Complex success = std::sqrt(1.0 - cfg.eta) * cfg.alpha / 2.0;
    const std::array<Complex, 3> outcomes{success, success * std::polar(1.0, -cfg.phi),
                                          success * std::polar(1.0, cfg.phi)};
    std::array<std::vector<Complex>, 3> bras;
    for (int i = 0; i < 3; ++i) bras[static_cast<std::size_t>(i)] = coherent_coefficients(outcomes[static_cast<std::size_t>(i)], n);

    double total = 0.0;
    double w_success = 0.0;
    std::vector<Complex> v_success(nq);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double w = 0.0;
            std::vector<Complex> v(nq, Complex{0, 0});
            for (std::size_t q = 0; q < nq; ++q) {
                Complex acc{0, 0};
                const Complex* wf = &psi[q * nn * nn];
                for (std::size_t m = 0; m < nn; ++m) {
                    Complex inner{0, 0};
                    for (std::size_t k = 0; k < nn; ++k)
                        inner += std::conj(bras[j][k]) * wf[m * nn + k];
                    acc += std::conj(bras[i][m]) * inner;
                }
                v[q] = acc;
                w += std::norm(acc);
            }
            total += w;
            if (i == 0 && j == 0) {
                w_success = w;
                v_success = std::move(v);
            }
        }
    if (!(total > 0)) throw ConfigError("pipeline_fock: zero pointer weight");

    PipelineResult res;
    res.p_success = w_success / total;
    res.success_weight = w_success;

    // reduced densities from the success-conditioned qubit vector
    auto bits = [](std::size_t q, int i) { return static_cast<int>((q >> (3 - i)) & 1u); };
    Eigen::Matrix4cd rho13 = Eigen::Matrix4cd::Zero();
    Eigen::Matrix4cd rho24 = Eigen::Matrix4cd::Zero();
    for (std::size_t q = 0; q < nq; ++q)
        for (std::size_t p = 0; p < nq; ++p) {
            const Complex t = v_success[q] * std::conj(v_success[p]);
            if (bits(q, 1) == bits(p, 1) && bits(q, 3) == bits(p, 3))
                rho13(2 * bits(q, 0) + bits(q, 2), 2 * bits(p, 0) + bits(p, 2)) += t;
            if (bits(q, 0) == bits(p, 0) && bits(q, 2) == bits(p, 2))
                rho24(2 * bits(q, 1) + bits(q, 3), 2 * bits(p, 1) + bits(p, 3)) += t;
        }
    rho13 /= w_success;
    rho24 /= w_success;
    res.rho13 = rho13;
    res.rho24 = rho24;

    Eigen::Vector4cd bell = Eigen::Vector4cd::Zero();
    bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
    res.f1 = (bell.adjoint() * rho13 * bell)(0, 0).real();
    res.f2 = (bell.adjoint() * rho24 * bell)(0, 0).real();
    return res;
}

} // namespace qcdma::fock
