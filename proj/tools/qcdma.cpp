#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qcdma/errors.hpp"
#include "qcdma/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chaotic-phase CDMA entanglement distribution scenario runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "JSON experiment configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory for artifacts");
    app.add_option_function<std::uint64_t>(
           "--seed",
           [&](std::uint64_t v) {
               seed = v;
               seed_given = true;
           },
           "seed overriding the config value")
        ->expected(1);

    auto* fig4 = app.add_subcommand("fig4", "bandwidth sweep: M factors and Lyapunov exponents");
    auto* fig5 = app.add_subcommand("fig5", "fidelity surface and bandwidth curves");
    auto* fig6 = app.add_subcommand("fig6", "fidelity versus channel loss");
    auto* sync = app.add_subcommand("sync", "drive-response synchronization demo");
    auto* dist = app.add_subcommand("distribute", "single distribution pipeline run");
    auto* oracle = app.add_subcommand("oracle-check", "branch simulator vs number-basis oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        qcdma::harness::ExperimentConfig cfg = config_path.empty()
                                                   ? qcdma::harness::default_config()
                                                   : qcdma::harness::load_config(config_path);
        if (seed_given) cfg.seed = seed;
        cfg.validate();

        const std::filesystem::path out(out_dir);
        if (fig4->parsed()) qcdma::harness::run_fig4(cfg, out);
        if (fig5->parsed()) qcdma::harness::run_fig5(cfg, out);
        if (fig6->parsed()) qcdma::harness::run_fig6(cfg, out);
        if (sync->parsed()) qcdma::harness::run_sync(cfg, out);
        if (dist->parsed()) qcdma::harness::run_distribute(cfg, out);
        if (oracle->parsed()) {
            const double worst = qcdma::harness::run_oracle_check(cfg, out);
            std::cout << "oracle-check worst absolute difference: " << worst << "\n";
        }
    } catch (const qcdma::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const qcdma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
