#include "qcdma/optics.hpp"

#include <cmath>

namespace qcdma::optics {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

void NetworkFactors::validate() const {
    if (!(m1 > 0.0 && m1 <= 1.0) && m1 != 0.0)
        throw ConfigError("NetworkFactors: M1 must lie in (0,1] (or 0 for the ideal limit)");
    if (!(m2 > 0.0 && m2 <= 1.0) && m2 != 0.0)
        throw ConfigError("NetworkFactors: M2 must lie in (0,1] (or 0 for the ideal limit)");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("NetworkFactors: eta must lie in [0,1]");
}

CoherentAmplitude phase_shift(CoherentAmplitude alpha, double theta) {
    return alpha * std::polar(1.0, -theta);
}

std::pair<CoherentAmplitude, CoherentAmplitude> beam_splitter_5050(CoherentAmplitude a,
                                                                  CoherentAmplitude b) {
    return {(a + b) * kInvSqrt2, (a - b) * kInvSqrt2};
}

CoherentAmplitude loss(CoherentAmplitude alpha, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("loss: eta must lie in [0,1]");
    return std::sqrt(1.0 - eta) * alpha;
}

std::pair<CoherentAmplitude, CoherentAmplitude> network_transfer(CoherentAmplitude alpha1,
                                                                 CoherentAmplitude alpha2,
                                                                 const NetworkFactors& f) {
    f.validate();
    const double direct = std::sqrt(1.0 - f.eta) / 2.0;
    const double cross = std::sqrt((1.0 - f.eta) * f.m1 * f.m2) / 2.0;
    return {direct * alpha1 + cross * alpha2, direct * alpha2 + cross * alpha1};
}

std::complex<double> coherent_overlap(CoherentAmplitude alpha, CoherentAmplitude beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

} // namespace qcdma::optics
