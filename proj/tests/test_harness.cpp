#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "qcdma/harness.hpp"

using namespace qcdma;
using namespace qcdma::harness;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("qcdma_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("default configuration validates and serializes round-trip") {
    const ExperimentConfig cfg = default_config();
    CHECK_NOTHROW(cfg.validate());
    const std::string j = to_json(cfg);
    const ExperimentConfig back = parse_config(j);
    CHECK(to_json(back) == j);
}

TEST_CASE("configs override defaults field by field") {
    const ExperimentConfig cfg = parse_config(R"({
        "circuit": {"resistance_ohm": 30.0, "transistor_model": "exponential"},
        "nbar": 25.0,
        "bandwidth_hz": 2.5e8,
        "sim": {"record_samples": 131072},
        "seed": 77
    })");
    CHECK(cfg.circuit.resistance == 30.0);
    CHECK(cfg.circuit.model == chaos::TransistorModel::Exponential);
    CHECK(cfg.circuit.inductance == 17.5e-9); // untouched default
    CHECK(cfg.dist.nbar == 25.0);
    CHECK(cfg.bandwidth_hz == 2.5e8);
    CHECK(cfg.sim.record_samples == 131072);
    CHECK(cfg.seed == 77);
}

TEST_CASE("unknown keys and malformed payloads are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"circuit": {"resistance": 30.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"circuit": {"resistance_ohm": "thirty"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1, 2, 3])"), ConfigError);
    // values that parse but fail validation
    CHECK_THROWS_AS(parse_config(R"({"sim": {"record_samples": 1024}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"band_lower_frac": 0.9, "band_upper_frac": 0.1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"eta": 2.0})"), ConfigError);
}

TEST_CASE("config files load from disk and missing paths fail") {
    TempDir tmp("cfg");
    const fs::path file = tmp.path / "cfg.json";
    std::ofstream(file) << R"({"seed": 5})";
    const ExperimentConfig cfg = load_config(file);
    CHECK(cfg.seed == 5);
    CHECK_THROWS_AS(load_config(tmp.path / "missing.json"), ConfigError);
}

TEST_CASE("seed derivation separates streams deterministically") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    // a zero base still yields distinct streams
    CHECK(derive_seed(0, 3) != derive_seed(0, 4));
}

TEST_CASE("seeded initial conditions are reproducible and near equilibrium") {
    const ExperimentConfig cfg = default_config();
    const chaos::CircuitState a = seeded_init(cfg.circuit, 9);
    const chaos::CircuitState b = seeded_init(cfg.circuit, 9);
    CHECK(a.v_c1 == b.v_c1);
    CHECK(a.v_c2 == b.v_c2);
    CHECK(a.i_l == b.i_l);

    const chaos::CircuitState eq = chaos::equilibrium(cfg.circuit);
    CHECK(std::abs(a.v_c1 - eq.v_c1) <= 0.5);
    CHECK(std::abs(a.v_c2 - eq.v_c2) <= 0.5);
    const chaos::CircuitState c = seeded_init(cfg.circuit, 10);
    CHECK(a.v_c1 != c.v_c1);
}

TEST_CASE("distribution scenario emits its artifacts deterministically") {
    ExperimentConfig cfg = default_config();
    cfg.dist.nbar = 10.0;
    cfg.seed = 1234;

    TempDir a("dist_a"), b("dist_b");
    run_distribute(cfg, a.path);
    run_distribute(cfg, b.path);

    for (const char* name : {"distribute.csv", "distribute.json", "distribute_result.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(a.path / name));
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    const std::string csv = slurp(a.path / "distribute.csv");
    CHECK(csv.rfind("nbar,phi_rad,m1,m2,eta,measurement_model,seed,f1,f2,p_success\n", 0) == 0);
    CHECK(csv.find(",,") == std::string::npos);
}

TEST_CASE("noise sweep scenario reproduces the closed-form first row") {
    ExperimentConfig cfg = default_config();
    cfg.eta_grid = {0.0, 0.5};
    TempDir tmp("fig6");
    run_fig6(cfg, tmp.path);
    const std::string csv = slurp(tmp.path / "fig6.csv");
    std::istringstream is(csv);
    std::string header, row;
    std::getline(is, header);
    CHECK(header == "eta,f1_ideal,f1_eom,f1_no_eom");
    std::getline(is, row);
    double eta, ideal, with_eom, no_eom;
    char c;
    std::istringstream(row) >> eta >> c >> ideal >> c >> with_eom >> c >> no_eom;
    CHECK(eta == 0.0);
    CHECK(ideal == 1.0);
    CHECK(with_eom == doctest::Approx(1.0 / (1.0 + std::exp(-2.5))).epsilon(1e-6));
    CHECK(no_eom < with_eom - 0.05);
}

TEST_CASE("synchronization scenario locks and reruns byte-identical") {
    ExperimentConfig cfg = default_config();
    cfg.sim.sync_samples = 1u << 14;
    cfg.sim.transient_periods = 200.0;
    cfg.seed = 42;

    TempDir a("sync_a"), b("sync_b");
    run_sync(cfg, a.path);
    run_sync(cfg, b.path);
    CHECK(slurp(a.path / "sync.csv") == slurp(b.path / "sync.csv"));

    // last row error column is far below the lock threshold
    const std::string csv = slurp(a.path / "sync.csv");
    const std::size_t last_nl = csv.rfind('\n', csv.size() - 2);
    const std::string last = csv.substr(last_nl + 1);
    const std::size_t comma = last.rfind(',');
    const double err = std::stod(last.substr(comma + 1));
    CHECK(err < 1e-6 * cfg.circuit.vcc);
}

TEST_CASE("channel analysis reports a spectrum with the expected support") {
    ExperimentConfig cfg = default_config();
    cfg.sim.record_samples = 1u << 17;
    cfg.sim.transient_periods = 200.0;
    const ChannelMetrics m = analyze_channel(cfg, 500e6, derive_seed(cfg.seed, 1), false);
    CHECK(m.bandwidth_target_hz == 500e6);
    // -20 dB support within a factor of two of the design point
    CHECK(m.bandwidth_measured_hz > 250e6);
    CHECK(m.bandwidth_measured_hz < 1000e6);
    CHECK(m.m_factor > 0.0);
    CHECK(m.m_factor < 1.0);
    CHECK(m.phase_average_abs >= 0.0);
    CHECK(m.phase_average_abs <= 1.0);
    CHECK(std::isnan(m.lambda_max));
    CHECK(m.trajectory.size() == cfg.sim.record_samples);
}
