#pragma once

#include <complex>
#include <utility>

#include "qcdma/errors.hpp"

namespace qcdma::optics {

/// Complex coherent-state amplitude; |alpha|^2 is the mean photon number.
using CoherentAmplitude = std::complex<double>;

/// Chaos-averaged network transfer coefficients plus the channel decay rate.
struct NetworkFactors {
    double m1 = 0.0;  ///< correction factor of channel 1, (0,1]
    double m2 = 0.0;  ///< correction factor of channel 2, (0,1]
    double eta = 0.0; ///< decay rate, [0,1]

    void validate() const;
};

/// alpha -> alpha * exp(-i*theta); magnitude preserved.
CoherentAmplitude phase_shift(CoherentAmplitude alpha, double theta);

/// 50:50 beam splitter: ((a+b)/sqrt2, (a-b)/sqrt2).
std::pair<CoherentAmplitude, CoherentAmplitude> beam_splitter_5050(CoherentAmplitude a,
                                                                  CoherentAmplitude b);

/// Channel loss: sqrt(1-eta)*alpha (vacuum noise port).
CoherentAmplitude loss(CoherentAmplitude alpha, double eta);

/// Chaos-averaged end-to-end transfer:
///   alpha3 = sqrt(1-eta)/2 * alpha1 + sqrt((1-eta)*M1*M2)/2 * alpha2
///   alpha4 = sqrt(1-eta)/2 * alpha2 + sqrt((1-eta)*M1*M2)/2 * alpha1
/// Vacuum noise ports contribute zero mean amplitude and are dropped.
std::pair<CoherentAmplitude, CoherentAmplitude> network_transfer(CoherentAmplitude alpha1,
                                                                 CoherentAmplitude alpha2,
                                                                 const NetworkFactors& f);

/// <alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(alpha)*beta).
std::complex<double> coherent_overlap(CoherentAmplitude alpha, CoherentAmplitude beta);

} // namespace qcdma::optics
