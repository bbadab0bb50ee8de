#include "pdqrng/extractor.hpp"
#include "pdqrng/laser/phase_diffusion.hpp"
#include "pdqrng/laser/rate_equations.hpp"
#include "pdqrng/mzi/interferometer.hpp"
#include "pdqrng/random.hpp"
#include "pdqrng/special_functions.hpp"
#include "pdqrng/stats.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

using namespace pdqrng;

namespace {

void BM_RateEquations(benchmark::State& state) {
    const auto params = laser::reference_params();
    const auto drive = laser::reference_drive(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto traj = laser::integrate_rate_equations(params, drive, 1.0, 0.0);
        benchmark::DoNotOptimize(traj.photons.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(drive.steps()));
}
BENCHMARK(BM_RateEquations)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Interference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto arms = mzi::sample_arm_powers({}, n, 1);
    const auto phases = laser::sample_pulse_phases(172.0, n, 1);
    mzi::InterferometerConfig cfg;
    cfg.visibility = 0.9;
    for (auto _ : state) {
        auto rec = mzi::interfere_pulse_train(arms.arm1, arms.arm2, phases, cfg, 1.45e-10, 2);
        benchmark::DoNotOptimize(rec.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Interference)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_Extraction(benchmark::State& state) {
    const std::size_t n = 1 << 18;
    Xoshiro256pp rng(3);
    std::vector<std::uint16_t> samples(n);
    for (auto& s : samples) {
        s = static_cast<std::uint16_t>(rng() & 0x3fff);
    }
    extractor::ExtractionConfig cfg;
    cfg.hash = state.range(0) == 0 ? "whirlpool" : "sha512";
    cfg.reduction_factor = 1.9;
    for (auto _ : state) {
        auto out = extractor::extract(samples, cfg);
        benchmark::DoNotOptimize(out.bits.size());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(n * 14 / 8));
    state.SetLabel(cfg.hash);
}
BENCHMARK(BM_Extraction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Battery(benchmark::State& state) {
    const std::size_t seq = 1000000;
    const std::size_t m = 20;
    Xoshiro256pp rng(4);
    BitBuffer bits;
    for (std::size_t i = 0; i < seq * m / 64; ++i) {
        bits.append(rng(), 64);
    }
    for (auto _ : state) {
        auto r = stats::run_battery(bits.view(), seq, 0.01);
        benchmark::DoNotOptimize(r.summary.m);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq * m));
}
BENCHMARK(BM_Battery)->Unit(benchmark::kMillisecond);

void BM_IncompleteGamma(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(incomplete_gamma_upper_regularized(4.5, x));
        x = x < 30.0 ? x + 0.37 : 0.1;
    }
}
BENCHMARK(BM_IncompleteGamma);

} // namespace

BENCHMARK_MAIN();
