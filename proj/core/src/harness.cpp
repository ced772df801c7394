#include "qcdma/harness.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qcdma/csv.hpp"
#include "qcdma/fock.hpp"

namespace qcdma::harness {

namespace fs = std::filesystem;
using nlohmann::json;

void SimulationOptions::validate() const {
    if (!(steps_per_period >= 100.0))
        throw ConfigError("sim.steps_per_period must be >= 100 (integrator accuracy guard)");
    if (record_samples < 65536) throw ConfigError("sim.record_samples must be >= 65536");
    if (!(transient_periods > 0.0) || !(lyapunov_transient_periods > 0.0) ||
        !(lyapunov_periods > 0.0))
        throw ConfigError("sim transient/total periods must be positive");
    if (sync_samples < 1024) throw ConfigError("sim.sync_samples must be >= 1024");
    if (!(sync_transient_frac > 0.0 && sync_transient_frac < 1.0))
        throw ConfigError("sim.sync_transient_frac must lie in (0,1)");
}

void ExperimentConfig::validate() const {
    circuit.validate();
    eom.validate();
    if (gain_override != 0.0 && !std::isfinite(gain_override))
        throw ConfigError("gain_override_rad_s_v must be finite");
    if (!(band_lower_frac > 0.0 && band_lower_frac < band_upper_frac))
        throw ConfigError("band fractions must satisfy 0 < lower < upper");
    dist.validate();
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be positive");
    if (bandwidth_grid_hz.empty() || m_grid.empty() || nbar_grid.empty() || eta_grid.empty())
        throw ConfigError("sweep grids must be non-empty");
    for (double b : bandwidth_grid_hz)
        if (!(b > 0.0)) throw ConfigError("bandwidth_grid_hz entries must be positive");
    sim.validate();
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.bandwidth_grid_hz = {50e6, 100e6, 150e6, 200e6, 250e6, 300e6, 350e6, 400e6, 450e6, 500e6};
    cfg.m_grid = {0.0, 1e-4, 1e-3, 2.5e-3, 5e-3, 1e-2, 2.5e-2, 5e-2, 0.1, 0.25, 0.5, 1.0};
    cfg.nbar_grid = {1.0, 3.0, 10.0, 30.0, 100.0};
    cfg.eta_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    return cfg;
}

namespace {

double require_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return j.get<double>();
}

void apply_keys(const json& j, const std::string& scope,
                const std::vector<std::pair<std::string, double*>>& slots) {
    if (!j.is_object()) throw ConfigError("config section '" + scope + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& [name, target] : slots)
            if (name == key) {
                *target = require_number(value, scope + "." + key);
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown config key '" + scope + "." + key + "'");
    }
}

std::vector<double> number_list(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(require_number(v, key));
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg = default_config();
    for (const auto& [key, value] : j.items()) {
        if (key == "circuit") {
            auto& c = cfg.circuit;
            json body = value;
            if (body.is_object() && body.contains("transistor_model")) {
                const auto name = body["transistor_model"].get<std::string>();
                if (name == "piecewise-linear")
                    c.model = chaos::TransistorModel::PiecewiseLinear;
                else if (name == "exponential")
                    c.model = chaos::TransistorModel::Exponential;
                else
                    throw ConfigError("unknown circuit.transistor_model '" + name + "'");
                body.erase("transistor_model");
            }
            apply_keys(body, "circuit",
                       {{"resistance_ohm", &c.resistance},
                        {"inductance_h", &c.inductance},
                        {"c1_f", &c.c1},
                        {"c2_f", &c.c2},
                        {"vcc_v", &c.vcc},
                        {"bias_current_a", &c.bias_current},
                        {"threshold_v", &c.threshold},
                        {"on_conductance_s", &c.on_conductance}});
        } else if (key == "eom") {
            auto& e = cfg.eom;
            apply_keys(value, "eom",
                       {{"carrier_rad_s", &e.carrier},
                        {"refractive_index", &e.refractive_index},
                        {"eo_coefficient_m_v", &e.eo_coefficient},
                        {"length_m", &e.length},
                        {"thickness_m", &e.thickness},
                        {"round_trip_s", &e.round_trip}});
        } else if (key == "sim") {
            auto& s = cfg.sim;
            json body = value;
            if (body.is_object() && body.contains("record_samples")) {
                s.record_samples = body["record_samples"].get<std::size_t>();
                body.erase("record_samples");
            }
            if (body.is_object() && body.contains("sync_samples")) {
                s.sync_samples = body["sync_samples"].get<std::size_t>();
                body.erase("sync_samples");
            }
            apply_keys(body, "sim",
                       {{"steps_per_period", &s.steps_per_period},
                        {"transient_periods", &s.transient_periods},
                        {"lyapunov_transient_periods", &s.lyapunov_transient_periods},
                        {"lyapunov_periods", &s.lyapunov_periods},
                        {"sync_transient_frac", &s.sync_transient_frac}});
        } else if (key == "gain_override_rad_s_v") {
            cfg.gain_override = require_number(value, key);
        } else if (key == "resolved_gain_rad_s_v") {
            // informational output field; accepted so emitted sidecars reload cleanly
            require_number(value, key);
        } else if (key == "band_lower_frac") {
            cfg.band_lower_frac = require_number(value, key);
        } else if (key == "band_upper_frac") {
            cfg.band_upper_frac = require_number(value, key);
        } else if (key == "nbar") {
            cfg.dist.nbar = require_number(value, key);
        } else if (key == "phi_rad") {
            cfg.dist.phi = require_number(value, key);
        } else if (key == "m1") {
            cfg.dist.m1 = require_number(value, key);
        } else if (key == "m2") {
            cfg.dist.m2 = require_number(value, key);
        } else if (key == "eta") {
            cfg.dist.eta = require_number(value, key);
        } else if (key == "measurement_model") {
            cfg.dist.model = entangle::parse_measurement_model(value.get<std::string>());
        } else if (key == "bandwidth_hz") {
            cfg.bandwidth_hz = require_number(value, key);
        } else if (key == "bandwidth_grid_hz") {
            cfg.bandwidth_grid_hz = number_list(value, key);
        } else if (key == "m_grid") {
            cfg.m_grid = number_list(value, key);
        } else if (key == "nbar_grid") {
            cfg.nbar_grid = number_list(value, key);
        } else if (key == "eta_grid") {
            cfg.eta_grid = number_list(value, key);
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

std::string to_json(const ExperimentConfig& cfg) {
    json j;
    j["circuit"] = {{"resistance_ohm", cfg.circuit.resistance},
                    {"inductance_h", cfg.circuit.inductance},
                    {"c1_f", cfg.circuit.c1},
                    {"c2_f", cfg.circuit.c2},
                    {"vcc_v", cfg.circuit.vcc},
                    {"bias_current_a", cfg.circuit.bias_current},
                    {"threshold_v", cfg.circuit.threshold},
                    {"on_conductance_s", cfg.circuit.on_conductance},
                    {"transistor_model",
                     cfg.circuit.model == chaos::TransistorModel::PiecewiseLinear
                         ? "piecewise-linear"
                         : "exponential"}};
    j["eom"] = {{"carrier_rad_s", cfg.eom.carrier},
                {"refractive_index", cfg.eom.refractive_index},
                {"eo_coefficient_m_v", cfg.eom.eo_coefficient},
                {"length_m", cfg.eom.length},
                {"thickness_m", cfg.eom.thickness},
                {"round_trip_s", cfg.eom.round_trip}};
    j["gain_override_rad_s_v"] = cfg.gain_override;
    j["resolved_gain_rad_s_v"] = cfg.gain();
    j["band_lower_frac"] = cfg.band_lower_frac;
    j["band_upper_frac"] = cfg.band_upper_frac;
    j["nbar"] = cfg.dist.nbar;
    j["phi_rad"] = cfg.dist.phi;
    j["m1"] = cfg.dist.m1;
    j["m2"] = cfg.dist.m2;
    j["eta"] = cfg.dist.eta;
    j["measurement_model"] = entangle::to_string(cfg.dist.model);
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    j["bandwidth_grid_hz"] = cfg.bandwidth_grid_hz;
    j["m_grid"] = cfg.m_grid;
    j["nbar_grid"] = cfg.nbar_grid;
    j["eta_grid"] = cfg.eta_grid;
    j["sim"] = {{"steps_per_period", cfg.sim.steps_per_period},
                {"record_samples", cfg.sim.record_samples},
                {"transient_periods", cfg.sim.transient_periods},
                {"lyapunov_transient_periods", cfg.sim.lyapunov_transient_periods},
                {"lyapunov_periods", cfg.sim.lyapunov_periods},
                {"sync_samples", cfg.sim.sync_samples},
                {"sync_transient_frac", cfg.sim.sync_transient_frac}};
    j["seed"] = cfg.seed;
    return j.dump(2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// reproducible uniform in [0,1) from the raw generator word
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << content;
}

void write_artifact(const fs::path& dir, const std::string& name, const std::string& csv,
                    const ExperimentConfig& cfg) {
    fs::create_directories(dir);
    write_file(dir / (name + ".csv"), csv);
    write_file(dir / (name + ".json"), to_json(cfg) + "\n");
}

std::string trajectory_csv(const chaos::Trajectory& traj, std::size_t max_rows) {
    chaos::Trajectory head = traj;
    if (head.samples.size() > max_rows) head.samples.resize(max_rows);
    std::ostringstream os;
    chaos::write_csv(os, head);
    return os.str();
}

std::string spectrum_csv(const spectral::PowerSpectrum& psd) {
    std::ostringstream os;
    spectral::write_csv(os, psd);
    return os.str();
}

} // namespace

chaos::CircuitState seeded_init(const chaos::CircuitParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    chaos::CircuitState s = chaos::equilibrium(p);
    s.v_c1 += unit_double(rng) - 0.5;
    s.v_c2 += unit_double(rng) - 0.5;
    s.i_l += (unit_double(rng) - 0.5) * 0.1 * p.vcc / p.resistance;
    return s;
}

ChannelMetrics analyze_channel(const ExperimentConfig& cfg, double bandwidth_hz,
                               std::uint64_t channel_seed, bool with_lyapunov) {
    const chaos::CircuitParams p = chaos::scale_to_bandwidth(cfg.circuit, bandwidth_hz);
    const double f0 = chaos::resonance_frequency(p);
    const double dt = 1.0 / (cfg.sim.steps_per_period * f0);

    const chaos::CircuitState init = seeded_init(p, channel_seed);
    const auto burn =
        static_cast<std::size_t>(cfg.sim.transient_periods * cfg.sim.steps_per_period);
    const chaos::Trajectory warm = chaos::integrate(p, init, dt, burn);
    chaos::Trajectory traj =
        chaos::integrate(p, warm.samples.back(), dt, cfg.sim.record_samples - 1,
                         warm.time_at(warm.size() - 1));

    std::vector<double> v2(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) v2[i] = traj.samples[i].v_c2;
    spectral::SignalTrace delta = spectral::detuning_from_voltage(v2, dt, cfg.gain());

    ChannelMetrics m;
    m.bandwidth_target_hz = bandwidth_hz;
    m.psd = spectral::estimate_psd(delta);
    m.bandwidth_measured_hz = spectral::bandwidth_at_level(m.psd);
    const spectral::Band band =
        spectral::band_for_bandwidth(bandwidth_hz, cfg.band_lower_frac, cfg.band_upper_frac);
    m.m_factor = spectral::correction_factor(m.psd, band);

    const double mean =
        std::accumulate(delta.values.begin(), delta.values.end(), 0.0) /
        static_cast<double>(delta.values.size());
    for (double& x : delta.values) x -= mean;
    const spectral::PhaseTrace theta = spectral::accumulate_phase(delta);
    m.phase_average_abs = std::abs(spectral::empirical_phase_average(theta, 0.0));

    if (with_lyapunov) {
        chaos::LyapunovOptions lo;
        lo.transient_time = cfg.sim.lyapunov_transient_periods / f0;
        lo.total_time = cfg.sim.lyapunov_periods / f0;
        lo.renorm_interval = 0.5 / f0;
        m.lambda_max = chaos::lyapunov_spectrum(p, init, lo)[0];
    } else {
        m.lambda_max = std::numeric_limits<double>::quiet_NaN();
    }
    m.trajectory = std::move(traj);
    return m;
}

void run_fig4(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::string table = "bandwidth_hz,m1,m2,m,lambda_max_1_s\n";
    for (std::size_t i = 0; i < cfg.bandwidth_grid_hz.size(); ++i) {
        const double bw = cfg.bandwidth_grid_hz[i];
        const ChannelMetrics c1 = analyze_channel(cfg, bw, derive_seed(cfg.seed, 2 * i), true);
        const ChannelMetrics c2 =
            analyze_channel(cfg, bw, derive_seed(cfg.seed, 2 * i + 1), false);
        append_cell(table, bw);
        append_cell(table, c1.m_factor);
        append_cell(table, c2.m_factor);
        append_cell(table, std::sqrt(c1.m_factor * c2.m_factor));
        append_cell(table, c1.lambda_max);
        table += '\n';
    }
    write_artifact(out_dir, "fig4", table, cfg);

    const std::array<double, 2> showcase{100e6, 500e6};
    for (std::size_t i = 0; i < showcase.size(); ++i) {
        const ChannelMetrics c =
            analyze_channel(cfg, showcase[i], derive_seed(cfg.seed, 1000 + i), false);
        const std::string tag = showcase[i] == 100e6 ? "100mhz" : "500mhz";
        write_artifact(out_dir, "fig4_portrait_" + tag, trajectory_csv(c.trajectory, 16384), cfg);
        write_artifact(out_dir, "fig4_spectrum_" + tag, spectrum_csv(c.psd), cfg);
    }
}

void run_fig5(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::string surface = "m,nbar,f1,f2,p_success\n";
    for (double m : cfg.m_grid)
        for (double nbar : cfg.nbar_grid) {
            entangle::DistributeConfig dc = cfg.dist;
            dc.nbar = nbar;
            dc.m1 = dc.m2 = m;
            dc.seed = cfg.seed;
            const entangle::DistributeResult r = entangle::distribute(dc);
            append_cell(surface, m);
            append_cell(surface, nbar);
            append_cell(surface, r.f1);
            append_cell(surface, r.f2);
            append_cell(surface, r.p_success);
            surface += '\n';
        }
    write_artifact(out_dir, "fig5_surface", surface, cfg);

    std::string curve = "bandwidth_hz,m1,m2,f1,f2,p_success\n";
    for (std::size_t i = 0; i < cfg.bandwidth_grid_hz.size(); ++i) {
        const double bw = cfg.bandwidth_grid_hz[i];
        const ChannelMetrics c1 =
            analyze_channel(cfg, bw, derive_seed(cfg.seed, 5000 + 2 * i), false);
        const ChannelMetrics c2 =
            analyze_channel(cfg, bw, derive_seed(cfg.seed, 5000 + 2 * i + 1), false);
        entangle::DistributeConfig dc = cfg.dist;
        dc.m1 = c1.m_factor;
        dc.m2 = c2.m_factor;
        dc.seed = cfg.seed;
        const entangle::DistributeResult r = entangle::distribute(dc);
        append_cell(curve, bw);
        append_cell(curve, dc.m1);
        append_cell(curve, dc.m2);
        append_cell(curve, r.f1);
        append_cell(curve, r.f2);
        append_cell(curve, r.p_success);
        curve += '\n';
    }
    write_artifact(out_dir, "fig5_bandwidth", curve, cfg);
}

void run_fig6(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::string table = "eta,f1_ideal,f1_eom,f1_no_eom\n";
    for (double eta : cfg.eta_grid) {
        entangle::DistributeConfig with_eom = cfg.dist;
        with_eom.eta = eta;
        with_eom.m1 = with_eom.m2 = 0.0;
        with_eom.seed = cfg.seed;
        entangle::DistributeConfig no_eom = with_eom;
        no_eom.m1 = no_eom.m2 = 1.0;
        const double f_eom = entangle::distribute(with_eom).f1;
        const double f_plain = entangle::distribute(no_eom).f1;
        append_cell(table, eta);
        append_cell(table, 1.0);
        append_cell(table, f_eom);
        append_cell(table, f_plain);
        table += '\n';
    }
    write_artifact(out_dir, "fig6", table, cfg);
}

void run_sync(const ExperimentConfig& cfg, const fs::path& out_dir) {
    const chaos::CircuitParams p = chaos::scale_to_bandwidth(cfg.circuit, cfg.bandwidth_hz);
    const double f0 = chaos::resonance_frequency(p);
    const double dt = 1.0 / (cfg.sim.steps_per_period * f0);

    const auto burn =
        static_cast<std::size_t>(cfg.sim.transient_periods * cfg.sim.steps_per_period);
    const chaos::Trajectory warm =
        chaos::integrate(p, seeded_init(p, derive_seed(cfg.seed, 100)), dt, burn);
    const chaos::Trajectory tx =
        chaos::integrate(p, warm.samples.back(), dt, cfg.sim.sync_samples - 1);

    std::vector<double> drive(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i) drive[i] = tx.samples[i].v_c1;
    const chaos::Trajectory rx =
        chaos::pecora_carroll_receive(p, drive, dt, seeded_init(p, derive_seed(cfg.seed, 101)));

    const double window = dt * static_cast<double>(tx.size() - 1);
    const chaos::SyncError err = chaos::sync_error(tx, rx, cfg.sim.sync_transient_frac * window);

    std::string table = "t,v_c2_tx,v_c2_rx,error\n";
    for (std::size_t i = 0; i < tx.size(); ++i) {
        append_cell(table, tx.time_at(i));
        append_cell(table, tx.samples[i].v_c2);
        append_cell(table, rx.samples[i].v_c2);
        append_cell(table, err.trace[i]);
        table += '\n';
    }
    write_artifact(out_dir, "sync", table, cfg);
}

void run_distribute(const ExperimentConfig& cfg, const fs::path& out_dir) {
    entangle::DistributeConfig dc = cfg.dist;
    dc.seed = cfg.seed;
    const entangle::DistributeResult r = entangle::distribute(dc);

    std::string table = "nbar,phi_rad,m1,m2,eta,measurement_model,seed,f1,f2,p_success\n";
    append_cell(table, dc.nbar);
    append_cell(table, dc.phi);
    append_cell(table, dc.m1);
    append_cell(table, dc.m2);
    append_cell(table, dc.eta);
    table += ',';
    table += entangle::to_string(dc.model);
    table += ',';
    table += std::to_string(dc.seed);
    append_cell(table, r.f1);
    append_cell(table, r.f2);
    append_cell(table, r.p_success);
    table += '\n';
    write_artifact(out_dir, "distribute", table, cfg);
    write_file(out_dir / "distribute_result.json", entangle::to_json(r) + "\n");
}

double OracleRow::max_abs_diff() const {
    double d = std::abs(branch_f1 - fock_f1);
    d = std::max(d, std::abs(branch_f2 - fock_f2));
    d = std::max(d, std::abs(branch_p - fock_p));
    return d;
}

std::vector<OracleRow> oracle_grid(const ExperimentConfig& cfg) {
    const std::array<double, 3> alphas{0.5, 1.0, 2.0};
    const std::array<double, 2> phis{M_PI / 6.0, M_PI / 3.0};
    const std::array<double, 2> etas{0.0, 0.3};
    const std::array<double, 2> ms{0.0, 0.25};

    std::vector<OracleRow> rows;
    for (double a : alphas)
        for (double phi : phis)
            for (double eta : etas)
                for (double m : ms) {
                    entangle::DistributeConfig dc;
                    dc.nbar = a * a;
                    dc.phi = phi;
                    dc.m1 = dc.m2 = m;
                    dc.eta = eta;
                    dc.model = entangle::MeasurementModel::CoherentProjection;
                    dc.seed = cfg.seed;
                    const entangle::DistributeResult br = entangle::distribute(dc);

                    fock::PipelineConfig fc;
                    fc.alpha = a;
                    fc.phi = phi;
                    fc.m1 = fc.m2 = m;
                    fc.eta = eta;
                    const fock::PipelineResult fr = fock::pipeline_fock(fc);

                    OracleRow row;
                    row.alpha = a;
                    row.phi = phi;
                    row.eta = eta;
                    row.m = m;
                    row.branch_f1 = br.f1;
                    row.branch_f2 = br.f2;
                    row.branch_p = br.p_success;
                    row.fock_f1 = fr.f1;
                    row.fock_f2 = fr.f2;
                    row.fock_p = fr.p_success;
                    rows.push_back(row);
                }
    return rows;
}

double run_oracle_check(const ExperimentConfig& cfg, const fs::path& out_dir) {
    const std::vector<OracleRow> rows = oracle_grid(cfg);
    std::string table =
        "alpha,phi_rad,eta,m,branch_f1,branch_f2,branch_p,fock_f1,fock_f2,fock_p,max_abs_diff\n";
    double worst = 0.0;
    for (const OracleRow& r : rows) {
        for (double v : {r.alpha, r.phi, r.eta, r.m, r.branch_f1, r.branch_f2, r.branch_p,
                         r.fock_f1, r.fock_f2, r.fock_p}) {
            append_cell(table, v);
        }
        append_cell(table, r.max_abs_diff());
        table += '\n';
        worst = std::max(worst, r.max_abs_diff());
    }
    write_artifact(out_dir, "oracle_check", table, cfg);
    return worst;
}

} // namespace qcdma::harness
