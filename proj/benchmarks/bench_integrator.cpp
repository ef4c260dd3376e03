#include <benchmark/benchmark.h>

#include "maxdde/integrator.hpp"

using namespace maxdde;

static void BM_integrate_one_period(benchmark::State& state) {
    const auto prob = preset_problem("ex2");
    IntegrateOptions io;
    io.dt = prob.params().h / static_cast<double>(state.range(0));
    const double q = prob.ftilde_inverse(1.0);
    for (auto _ : state) {
        auto tr = integrate(prob, q, History::constant(1.0), q + prob.T(), io);
        benchmark::DoNotOptimize(tr.values().back());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(prob.T() / io.dt));
}
BENCHMARK(BM_integrate_one_period)->Arg(500)->Arg(2000)->Arg(8000);

static void BM_window_max_query(benchmark::State& state) {
    const auto prob = preset_problem("ex2");
    const double q = prob.ftilde_inverse(1.5);
    auto tr = integrate(prob, q, History::constant(1.5), q + 3 * prob.T(), {});
    double t = q + prob.params().h;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tr.window_max(t));
        t += 0.37;
        if (t > tr.t_end()) t = q + prob.params().h;
    }
}
BENCHMARK(BM_window_max_query);

static void BM_detect_events(benchmark::State& state) {
    const auto prob = preset_problem("ex2");
    const double q = prob.ftilde_inverse(0.7);
    auto tr = integrate(prob, q, History::constant(0.7), q + 10 * prob.T(), {});
    for (auto _ : state) {
        auto evs = detect_qualified_maxima(prob, tr);
        benchmark::DoNotOptimize(evs.size());
    }
}
BENCHMARK(BM_detect_events);
