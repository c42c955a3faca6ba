#include <benchmark/benchmark.h>

#include "sgbh/kernel.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"
#include "sgbh/presets.hpp"

namespace {

sgbh::KernelConfig unit_cfg() {
    sgbh::KernelConfig cfg;
    cfg.nu = 1.0;
    return cfg;
}

void BM_GreenEvalImage(benchmark::State& state) {
    const auto cfg = unit_cfg();
    double tau = 0.01, acc = 0.0;
    for (auto _ : state) {
        acc += sgbh::green_eval(tau, 0.3, 0.7, cfg);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_GreenEvalImage);

void BM_GreenEvalSpectral(benchmark::State& state) {
    const auto cfg = unit_cfg();
    double acc = 0.0;
    for (auto _ : state) {
        acc += sgbh::green_eval(0.2, 0.3, 0.7, cfg);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_GreenEvalSpectral);

void BM_KernelTableBuild(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    sgbh::TimeGrid tg(100, 0.5);
    sgbh::SpatialGrid sg(m);
    for (auto _ : state) {
        sgbh::KernelTable table(tg, sg, unit_cfg());
        benchmark::DoNotOptimize(table.values(1)[0]);
    }
}
BENCHMARK(BM_KernelTableBuild)->Arg(31)->Arg(63);

void BM_SampleSheet(benchmark::State& state) {
    sgbh::TimeGrid tg(200, 0.5);
    sgbh::SpatialGrid sg(63);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto sheet = sgbh::sample_sheet(++seed, tg, sg);
        benchmark::DoNotOptimize(sheet.dW[0]);
    }
}
BENCHMARK(BM_SampleSheet);

void BM_MildSolve(benchmark::State& state) {
    const int m = 31, n = 100;
    sgbh::TimeGrid tg(n, 0.25);
    sgbh::SpatialGrid sg(m);
    sgbh::ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.25);
    sgbh::KernelTable table(tg, sg, unit_cfg());
    auto g = sgbh::make_noise_preset("constant", 0.1);
    auto u0 = sgbh::make_initial_preset("sine", 0.5, sg);
    sgbh::TruncationLevel trunc{10.0, 3.0};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto sheet = sgbh::sample_sheet(++seed, tg, sg);
        auto u = sgbh::mild_solve(u0, sheet, params, g, trunc, table);
        benchmark::DoNotOptimize(u.values[0]);
    }
}
BENCHMARK(BM_MildSolve);

void BM_GalerkinSolve(benchmark::State& state) {
    const int m = 63, n = 400;
    sgbh::TimeGrid tg(n, 0.5);
    sgbh::SpatialGrid sg(m);
    sgbh::ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.5);
    auto g = sgbh::make_noise_preset("constant", 0.1);
    auto u0 = sgbh::make_initial_preset("sine", 0.5, sg);
    sgbh::GalerkinConfig cfg;
    cfg.n_modes = m;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto sheet = sgbh::sample_sheet(++seed, tg, sg);
        auto u = sgbh::galerkin_solve(u0, sheet, params, g, cfg);
        benchmark::DoNotOptimize(u.values[0]);
    }
}
BENCHMARK(BM_GalerkinSolve);

}  // namespace

BENCHMARK_MAIN();
