#include <benchmark/benchmark.h>

#include <random>

#include "qcdma/chaos.hpp"
#include "qcdma/entangle.hpp"
#include "qcdma/fock.hpp"
#include "qcdma/spectral.hpp"

using namespace qcdma;

static void BM_Rk4Steps(benchmark::State& state) {
    chaos::CircuitParams p;
    chaos::CircuitState init = chaos::equilibrium(p);
    init.v_c2 += 0.01;
    const double dt = 1.0 / (100.0 * chaos::resonance_frequency(p));
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        const chaos::Trajectory t = chaos::integrate(p, init, dt, n);
        benchmark::DoNotOptimize(t.samples.back());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(n));
}
BENCHMARK(BM_Rk4Steps)->Arg(1 << 14)->Arg(1 << 16);

static void BM_LyapunovSpectrum(benchmark::State& state) {
    chaos::CircuitParams p;
    chaos::CircuitState init = chaos::equilibrium(p);
    init.v_c2 += 0.01;
    chaos::LyapunovOptions opts;
    opts.transient_time = 0.5e-6;
    opts.total_time = 2e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(chaos::lyapunov_spectrum(p, init, opts));
    }
}
BENCHMARK(BM_LyapunovSpectrum);

static void BM_WelchPsd(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> dist;
    spectral::SignalTrace s;
    s.dt = 1e-9;
    s.values.resize(static_cast<std::size_t>(state.range(0)));
    for (double& x : s.values) x = dist(rng);
    spectral::WelchOptions opts;
    opts.segment_length = 16384;
    for (auto _ : state) {
        const spectral::PowerSpectrum psd = spectral::estimate_psd(s, opts);
        benchmark::DoNotOptimize(psd.density.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_WelchPsd)->Arg(1 << 17)->Arg(1 << 19);

static void BM_Distribute(benchmark::State& state) {
    entangle::DistributeConfig cfg;
    cfg.nbar = 10.0;
    cfg.eta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(entangle::distribute(cfg));
    }
}
BENCHMARK(BM_Distribute);

static void BM_FockPipeline(benchmark::State& state) {
    fock::PipelineConfig cfg;
    cfg.alpha = 0.1 * static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::pipeline_fock(cfg));
    }
}
BENCHMARK(BM_FockPipeline)->Arg(5)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
