// Compares the serial reference harness with the OpenMP one on the
// bias/RMSE workload. The two paths must produce identical numbers; this
// target only measures throughput.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "lbtail/experiments.hpp"
#include "lbtail/models.hpp"

namespace {

lbtail::ExperimentSpec bench_spec(std::size_t replicates) {
    return lbtail::ExperimentSpec{
        lbtail::parse_model("burr(10,4,1)"),
        lbtail::parse_model("burr(10,2,1)"),
        200,
        replicates,
        lbtail::default_k_grid(200),
        std::nullopt,
        20240611ULL};
}

void BM_BiasRmseSerial(benchmark::State& state) {
    const auto spec = bench_spec(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto result = lbtail::run_bias_rmse(spec, /*threads=*/1);
        benchmark::DoNotOptimize(result);
    }
}

void BM_BiasRmseOpenMP(benchmark::State& state) {
    const auto spec = bench_spec(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto result = lbtail::run_bias_rmse(spec, /*threads=*/0);
        benchmark::DoNotOptimize(result);
    }
}

void BM_CltSerial(benchmark::State& state) {
    const auto x = lbtail::parse_model("pareto(0.25,1)");
    const auto y = lbtail::parse_model("pareto(0.5,1)");
    for (auto _ : state) {
        auto report = lbtail::run_clt_check(
            x, y, 2000, 50, static_cast<std::size_t>(state.range(0)),
            987654321ULL, /*threads=*/1);
        benchmark::DoNotOptimize(report);
    }
}

void BM_CltOpenMP(benchmark::State& state) {
    const auto x = lbtail::parse_model("pareto(0.25,1)");
    const auto y = lbtail::parse_model("pareto(0.5,1)");
    for (auto _ : state) {
        auto report = lbtail::run_clt_check(
            x, y, 2000, 50, static_cast<std::size_t>(state.range(0)),
            987654321ULL, /*threads=*/0);
        benchmark::DoNotOptimize(report);
    }
}

}  // namespace

BENCHMARK(BM_BiasRmseSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BiasRmseOpenMP)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CltSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CltOpenMP)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
