#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcdma/chaos.hpp"

using namespace qcdma;
using namespace qcdma::chaos;

namespace {

CircuitState perturbed_equilibrium(const CircuitParams& p, double dv = 0.01) {
    CircuitState s = equilibrium(p);
    s.v_c2 += dv;
    return s;
}

} // namespace

TEST_CASE("emitter current vanishes in the cutoff region") {
    CircuitParams p;
    CHECK(emitter_current(p, 0.0) == 0.0);
    CHECK(emitter_current(p, -p.threshold) == 0.0);
    CHECK(emitter_current(p, -p.threshold + 0.1) == 0.0);
    // active region: I_E = Gon * (-v_c2 - Vth)
    const double v = -p.threshold - 0.5;
    CHECK(emitter_current(p, v) == doctest::Approx(p.on_conductance * 0.5).epsilon(1e-12));
}

TEST_CASE("vector field is zero at the active-region equilibrium") {
    CircuitParams p;
    const CircuitState eq = equilibrium(p);
    const CircuitState f = vector_field(p, eq);
    CHECK(std::abs(f.v_c1) < 1e-6);
    CHECK(std::abs(f.v_c2) < 1e-6);
    CHECK(std::abs(f.i_l) < 1e-3);
}

TEST_CASE("tank resonance sits near 474 MHz for the reference components") {
    CircuitParams p;
    CHECK(resonance_frequency(p) == doctest::Approx(4.7377e8).epsilon(1e-3));
}

TEST_CASE("zero-step integration returns the initial state only") {
    CircuitParams p;
    const CircuitState init = perturbed_equilibrium(p);
    const Trajectory t = integrate(p, init, 1e-11, 0);
    REQUIRE(t.size() == 1);
    CHECK(t.samples[0].v_c1 == init.v_c1);
    CHECK(t.samples[0].v_c2 == init.v_c2);
    CHECK(t.samples[0].i_l == init.i_l);
}

TEST_CASE("integrator shows fourth-order convergence on the smooth model") {
    CircuitParams p;
    p.model = TransistorModel::Exponential;
    const CircuitState init = perturbed_equilibrium(p);
    const double horizon = 20e-9;

    auto endpoint = [&](std::size_t n) {
        return integrate(p, init, horizon / static_cast<double>(n), n).samples.back();
    };
    const CircuitState a = endpoint(1024);
    const CircuitState b = endpoint(2048);
    const CircuitState ref = endpoint(32768);

    const double ea = std::abs(a.v_c2 - ref.v_c2);
    const double eb = std::abs(b.v_c2 - ref.v_c2);
    REQUIRE(eb > 0.0);
    // halving dt should shrink the error by about 2^4
    CHECK(ea / eb == doctest::Approx(16.0).epsilon(0.35));
}

TEST_CASE("reference circuit stays inside the bounding box for 100 microseconds") {
    CircuitParams p;
    const double dt = 1.0 / (100.0 * resonance_frequency(p));
    const auto n = static_cast<std::size_t>(100e-6 / dt);
    const Trajectory t = integrate(p, perturbed_equilibrium(p), dt, n);
    CHECK(t.size() == n + 1);
    for (std::size_t i = t.size() - 16; i < t.size(); ++i)
        CHECK(inside_bounding_box(p, t.samples[i]));
}

TEST_CASE("divergence raises an error carrying the offending step") {
    CircuitParams p;
    p.bias_current = 4.0; // far outside the design envelope, escapes quickly
    bool thrown = false;
    try {
        integrate(p, perturbed_equilibrium(p, 2.0), 1e-11, 20000);
    } catch (const DivergenceError& e) {
        thrown = true;
        CHECK(e.step() >= 1);
        CHECK(e.step() <= 20000);
    }
    CHECK(thrown);
}

TEST_CASE("integration guards reject bad steps and states") {
    CircuitParams p;
    const CircuitState init = perturbed_equilibrium(p);
    CHECK_THROWS_AS(integrate(p, init, 0.0, 10), ConfigError);
    CHECK_THROWS_AS(integrate(p, init, 1e-9, 10), ConfigError); // above the dt guard
    CircuitState bad = init;
    bad.v_c1 = std::nan("");
    CHECK_THROWS_AS(integrate(p, bad, 1e-11, 10), ConfigError);
}

TEST_CASE("parameter validation rejects non-physical components") {
    CircuitParams p;
    p.resistance = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = CircuitParams{};
    p.threshold = 20.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("Lyapunov exponents sum to the field divergence -R/L") {
    CircuitParams p;
    LyapunovOptions opts;
    opts.transient_time = 1e-6;
    opts.total_time = 8e-6;
    const auto lam = lyapunov_spectrum(p, perturbed_equilibrium(p), opts);
    const double sum = lam[0] + lam[1] + lam[2];
    CHECK(sum == doctest::Approx(-p.resistance / p.inductance).epsilon(1e-3));
    CHECK(lam[0] >= lam[1]);
    CHECK(lam[1] >= lam[2]);
}

TEST_CASE("reference circuit is weakly chaotic") {
    CircuitParams p;
    LyapunovOptions opts;
    opts.transient_time = 2e-6;
    opts.total_time = 30e-6;
    const auto lam = lyapunov_spectrum(p, perturbed_equilibrium(p), opts);
    CHECK(lam[0] > 0.0);
    // largest exponent well below the oscillation rate
    CHECK(lam[0] < 0.02 * 2.0 * M_PI * kReferenceBandwidthHz);
}

TEST_CASE("conditional exponents of the driven subsystem are -R/(2L) twice") {
    CircuitParams p;
    const auto mu = conditional_exponents(p);
    const double expected = -p.resistance / (2.0 * p.inductance);
    CHECK(mu[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(mu[1] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bandwidth scaling is the identity at the reference point") {
    CircuitParams p;
    const CircuitParams q = scale_to_bandwidth(p, kReferenceBandwidthHz);
    CHECK(q.inductance == p.inductance);
    CHECK(q.c1 == p.c1);
    CHECK(q.c2 == p.c2);
    CHECK(q.resistance == p.resistance);
}

TEST_CASE("bandwidth scaling stretches the reactive components linearly") {
    CircuitParams p;
    const CircuitParams q = scale_to_bandwidth(p, 50e6);
    CHECK(q.inductance == doctest::Approx(10.0 * p.inductance).epsilon(1e-12));
    CHECK(q.c1 == doctest::Approx(10.0 * p.c1).epsilon(1e-12));
    CHECK(q.c2 == doctest::Approx(10.0 * p.c2).epsilon(1e-12));
    CHECK(q.resistance == p.resistance);
    CHECK(resonance_frequency(q) == doctest::Approx(resonance_frequency(p) / 10.0).epsilon(1e-12));
}

TEST_CASE("halving the bandwidth is a bitwise time rescale") {
    CircuitParams p;
    const CircuitParams q = scale_to_bandwidth(p, kReferenceBandwidthHz / 2.0);
    const CircuitState init = perturbed_equilibrium(p);
    const double dt = 1e-11;
    const Trajectory a = integrate(p, init, dt, 4000);
    const Trajectory b = integrate(q, init, 2.0 * dt, 4000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].v_c1 == b.samples[i].v_c1);
        CHECK(a.samples[i].v_c2 == b.samples[i].v_c2);
        CHECK(a.samples[i].i_l == b.samples[i].i_l);
    }
}

TEST_CASE("receiver locks exactly when initialized on the transmitter state") {
    CircuitParams p;
    const CircuitState init = perturbed_equilibrium(p);
    const double dt = 1e-11;
    const std::size_t n = 20000;
    const Trajectory tx = integrate(p, init, dt, n);
    std::vector<double> drive(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i) drive[i] = tx.samples[i].v_c1;
    const Trajectory rx = pecora_carroll_receive(p, drive, dt, init);
    const SyncError e = sync_error(tx, rx, 0.0);
    CHECK(e.max_after_transient == 0.0);
}

TEST_CASE("receiver converges from a mismatched initial condition") {
    CircuitParams p;
    const CircuitState init = perturbed_equilibrium(p);
    const double dt = 1e-11;
    const std::size_t n = 1u << 16;
    const Trajectory tx = integrate(p, init, dt, n);
    std::vector<double> drive(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i) drive[i] = tx.samples[i].v_c1;

    CircuitState other = init;
    other.v_c2 += 1.0;
    other.i_l += 5e-3;
    const Trajectory rx = pecora_carroll_receive(p, drive, dt, other);
    const double transient = 0.25 * dt * static_cast<double>(n);
    const SyncError e = sync_error(tx, rx, transient);
    CHECK(e.max_after_transient < 1e-6 * p.vcc);

    // a free-running copy from the same mismatched state does not lock
    const Trajectory free_run = integrate(p, other, dt, n);
    const SyncError ef = sync_error(tx, free_run, transient);
    CHECK(ef.max_after_transient > 1e-2 * p.vcc);
}

TEST_CASE("sync error rejects mismatched trajectories") {
    CircuitParams p;
    const CircuitState init = perturbed_equilibrium(p);
    const Trajectory a = integrate(p, init, 1e-11, 100);
    const Trajectory b = integrate(p, init, 1e-11, 50);
    CHECK_THROWS_AS(sync_error(a, b, 0.0), ConfigError);
    Trajectory c = integrate(p, init, 2e-11, 100);
    CHECK_THROWS_AS(sync_error(a, c, 0.0), ConfigError);
}

TEST_CASE("trajectory CSV starts with the header and has one row per sample") {
    CircuitParams p;
    const Trajectory t = integrate(p, perturbed_equilibrium(p), 1e-11, 8);
    std::ostringstream os;
    write_csv(os, t);
    const std::string s = os.str();
    CHECK(s.rfind("t,v_c1,v_c2,i_l\n", 0) == 0);
    std::size_t rows = 0;
    for (char ch : s)
        if (ch == '\n') ++rows;
    CHECK(rows == t.size() + 1);
}
