#include <benchmark/benchmark.h>

#include "maxdde/return_map.hpp"

using namespace maxdde;

static void BM_eval_R(benchmark::State& state) {
    const ReturnMap rm(preset_problem("ex2"));
    const double p = 1e-3 * static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rm.eval(p).R);
}
BENCHMARK(BM_eval_R)->Arg(100)->Arg(1500)->Arg(2500);

static void BM_derivative_R(benchmark::State& state) {
    const ReturnMap rm(preset_problem("ex2"));
    rm.fundamental();  // warm the cached fundamental solution
    const auto s = rm.eval(1.5);
    for (auto _ : state) benchmark::DoNotOptimize(rm.derivative(s));
}
BENCHMARK(BM_derivative_R);

static void BM_condition_fs(benchmark::State& state) {
    const ReturnMap rm(preset_problem("ex2"));
    double q = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rm.condition_fs(q));
        q = q < 2.8 ? q + 0.05 : 0.3;
    }
}
BENCHMARK(BM_condition_fs);
