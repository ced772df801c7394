#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qcdma/errors.hpp"

namespace qcdma::fock {

using Complex = std::complex<double>;

/// Truncated number-basis state over qubits (dimension 2^n) tensored with
/// bosonic modes of per-mode cutoff. Index layout: qubit configuration is
/// the slowest index, then modes in order.
struct FockVector {
    int n_qubits = 0;
    std::vector<int> cutoffs;    ///< per-mode dimension (N means levels 0..N-1)
    std::vector<Complex> amp;

    std::size_t dim() const;
    double norm() const;
};

/// Cutoff rule N >= 10*|alpha|^2 + 10.
int cutoff_for(double alpha_abs);

/// Coefficients e^{-|a|^2/2} a^n / sqrt(n!) of |alpha> up to cutoff.
/// Throws when the truncated norm deficit exceeds 1e-8.
std::vector<Complex> coherent_coefficients(Complex alpha, int cutoff);

/// Single-mode coherent state as a FockVector (no qubits).
FockVector coherent_fock(Complex alpha, int cutoff);

/// Two-mode beam splitter a -> (a+b)/sqrt2, b -> (a-b)/sqrt2 at the default
/// angle pi/4; general angle mixes with (cos, sin). Unitary on the retained
/// subspace; throws on cutoff overflow beyond the tolerance.
FockVector beamsplitter_fock(const FockVector& state, std::size_t mode_a, std::size_t mode_b,
                             double angle = M_PI / 4.0);

/// Qubit-conditional pointer rotation exp(-+ i (phi/2) n) on one mode:
/// g picks e^{-i phi/2 n}, e picks e^{+i phi/2 n}.
FockVector dispersive_fock(const FockVector& state, int qubit, std::size_t mode, double phi);

struct PipelineConfig {
    Complex alpha = 1.0;  ///< probe amplitude (|alpha| <= 2 intended)
    double phi = M_PI / 3.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double eta = 0.0;
};

struct PipelineResult {
    double f1 = 0.0;
    double f2 = 0.0;
    double p_success = 0.0;     ///< normalized over the 3x3 pointer set
    double success_weight = 0.0;///< raw Born weight of the joint success projection
    Eigen::Matrix4cd rho13;
    Eigen::Matrix4cd rho24;
};

/// Number-basis run of the full distribution pipeline on small amplitudes.
/// The chaos-averaged network map is applied per qubit sector after an
/// explicit coherence audit of the sector wavefunction.
PipelineResult pipeline_fock(const PipelineConfig& cfg);

} // namespace qcdma::fock
