#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qcdma/entangle.hpp"
#include "qcdma/fock.hpp"

using namespace qcdma;
using namespace qcdma::fock;

using cd = std::complex<double>;

TEST_CASE("cutoff rule gives comfortable headroom") {
    CHECK(cutoff_for(0.0) >= 10);
    CHECK(cutoff_for(1.0) >= 20);
    CHECK(cutoff_for(2.0) >= 50);
}

TEST_CASE("coherent coefficients are normalized and start at the vacuum weight") {
    const cd alpha(1.2, -0.4);
    const auto c = coherent_coefficients(alpha, cutoff_for(std::abs(alpha)));
    double norm = 0.0;
    for (const cd& x : c) norm += std::norm(x);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(c[0] - std::exp(-0.5 * std::norm(alpha))) < 1e-12);
    CHECK(std::abs(c[1] - alpha * std::exp(-0.5 * std::norm(alpha))) < 1e-12);

    // a too-small cutoff trips the norm audit
    CHECK_THROWS(coherent_coefficients(cd(2.0, 0.0), 5));
}

TEST_CASE("single-mode coherent state has unit norm") {
    const FockVector v = coherent_fock(cd(0.9, 0.3), cutoff_for(1.0));
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(v.dim() == static_cast<std::size_t>(v.cutoffs[0]));
}

TEST_CASE("beam splitter maps coherent pairs to coherent pairs") {
    const cd a(0.8, 0.0), b(0.3, 0.4);
    const int n = cutoff_for(1.5);
    FockVector in;
    in.n_qubits = 0;
    in.cutoffs = {n, n};
    const auto ca = coherent_coefficients(a, n);
    const auto cb = coherent_coefficients(b, n);
    in.amp.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) in.amp[static_cast<std::size_t>(i) * n + j] = ca[i] * cb[j];

    const FockVector out = beamsplitter_fock(in, 0, 1);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-7));

    const cd oa = (a + b) / std::sqrt(2.0), ob = (a - b) / std::sqrt(2.0);
    const auto ea = coherent_coefficients(oa, n);
    const auto eb = coherent_coefficients(ob, n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst,
                             std::abs(out.amp[static_cast<std::size_t>(i) * n + j] - ea[i] * eb[j]));
    CHECK(worst < 1e-7);
}

TEST_CASE("dispersive coupling rotates a coherent pointer by half the phase") {
    const double phi = M_PI / 3.0;
    const cd alpha(1.0, 0.0);
    const int n = cutoff_for(1.0);
    const auto c = coherent_coefficients(alpha, n);

    FockVector in;
    in.n_qubits = 1;
    in.cutoffs = {n};
    in.amp.resize(2u * n);
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < n; ++k) {
        in.amp[static_cast<std::size_t>(k)] = r * c[k];      // ground sector
        in.amp[static_cast<std::size_t>(n + k)] = r * c[k];  // excited sector
    }

    const FockVector out = dispersive_fock(in, 0, 0, phi);
    const auto cg = coherent_coefficients(alpha * std::exp(cd(0.0, -phi / 2.0)), n);
    const auto ce = coherent_coefficients(alpha * std::exp(cd(0.0, +phi / 2.0)), n);
    for (int k = 0; k < n; ++k) {
        CHECK(std::abs(out.amp[static_cast<std::size_t>(k)] - r * cg[k]) < 1e-10);
        CHECK(std::abs(out.amp[static_cast<std::size_t>(n + k)] - r * ce[k]) < 1e-10);
    }
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("number-basis pipeline reproduces the ideal limit qualitatively") {
    PipelineConfig cfg;
    cfg.alpha = 2.0; // nbar = 4
    const PipelineResult r = pipeline_fock(cfg);
    CHECK(r.p_success == doctest::Approx(0.25).epsilon(0.05));
    CHECK(r.f1 > 0.7);
    CHECK(r.f1 == doctest::Approx(r.f2).epsilon(1e-8));
}

TEST_CASE("number-basis pipeline matches the amplitude-tracking simulator") {
    for (double alpha : {0.5, 1.0}) {
        for (double eta : {0.0, 0.3}) {
            PipelineConfig fc;
            fc.alpha = alpha;
            fc.eta = eta;
            fc.m1 = fc.m2 = 0.25;
            const PipelineResult fr = pipeline_fock(fc);

            entangle::DistributeConfig bc;
            bc.nbar = alpha * alpha;
            bc.eta = eta;
            bc.m1 = bc.m2 = 0.25;
            const entangle::DistributeResult br = entangle::distribute(bc);

            CHECK(fr.f1 == doctest::Approx(br.f1).epsilon(1e-4));
            CHECK(fr.f2 == doctest::Approx(br.f2).epsilon(1e-4));
            CHECK(fr.p_success == doctest::Approx(br.p_success).epsilon(1e-4));
        }
    }
}
