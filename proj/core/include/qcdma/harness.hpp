#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcdma/chaos.hpp"
#include "qcdma/entangle.hpp"
#include "qcdma/spectral.hpp"

namespace qcdma::harness {

/// Integration budgets, expressed in linear-resonance periods of the scaled
/// circuit so every bandwidth point costs the same number of steps.
struct SimulationOptions {
    double steps_per_period = 100.0;
    std::size_t record_samples = 1u << 19;
    double transient_periods = 500.0;
    double lyapunov_transient_periods = 1000.0;
    double lyapunov_periods = 20000.0;
    std::size_t sync_samples = 1u << 17;
    double sync_transient_frac = 0.25;

    void validate() const;
};

/// Resolved experiment configuration. JSON keys carry explicit units in
/// their names; unknown keys are rejected.
struct ExperimentConfig {
    chaos::CircuitParams circuit;
    spectral::EomParams eom;
    double gain_override = 0.0; ///< rad/(s V); 0 selects eom.gain()
    double band_lower_frac = 0.05;
    double band_upper_frac = 0.4812;
    entangle::DistributeConfig dist;
    double bandwidth_hz = 500e6;
    std::vector<double> bandwidth_grid_hz;
    std::vector<double> m_grid;
    std::vector<double> nbar_grid;
    std::vector<double> eta_grid;
    SimulationOptions sim;
    std::uint64_t seed = 0;

    double gain() const { return gain_override != 0.0 ? gain_override : eom.gain(); }
    void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig parse_config(const std::string& json_text); ///< throws ConfigError
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& cfg);

/// Stream-splitting seed derivation (splitmix-style mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Seeded initial condition: equilibrium plus a bounded perturbation.
chaos::CircuitState seeded_init(const chaos::CircuitParams& p, std::uint64_t seed);

/// Everything fig4/fig5 need per (bandwidth, channel) point.
struct ChannelMetrics {
    double bandwidth_target_hz = 0.0;
    double bandwidth_measured_hz = 0.0;
    double m_factor = 0.0;
    double lambda_max = 0.0; ///< NaN when the exponent was not requested
    double phase_average_abs = 0.0;
    spectral::PowerSpectrum psd;
    chaos::Trajectory trajectory;
};

ChannelMetrics analyze_channel(const ExperimentConfig& cfg, double bandwidth_hz,
                               std::uint64_t channel_seed, bool with_lyapunov);

void run_fig4(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
void run_fig5(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
void run_fig6(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
void run_sync(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
void run_distribute(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct OracleRow {
    double alpha = 0.0;
    double phi = 0.0;
    double eta = 0.0;
    double m = 0.0;
    double branch_f1 = 0.0, branch_f2 = 0.0, branch_p = 0.0;
    double fock_f1 = 0.0, fock_f2 = 0.0, fock_p = 0.0;

    double max_abs_diff() const;
};

/// Branch simulator against the number-basis validator over the standard
/// amplitude/phase/loss/crosstalk grid.
std::vector<OracleRow> oracle_grid(const ExperimentConfig& cfg);

/// Emits the comparison table and returns the worst absolute difference.
double run_oracle_check(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

} // namespace qcdma::harness
