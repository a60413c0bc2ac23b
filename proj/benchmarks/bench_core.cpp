#include <benchmark/benchmark.h>

#include "qf/algebra.hpp"
#include "qf/curve.hpp"
#include "qf/dynamics.hpp"

namespace {

using namespace qf;

parameter_set trig_ref() {
    parameter_set p;
    p.tag = case_tag::trig;
    p.mu = 1.0;
    p.A = {1, 0, 0, 1, 0, -1, 3};
    return p;
}

void bm_residuals(benchmark::State& state) {
    const parameter_set P = trig_ref();
    const curve_point pt{0.3, 0.7, 1.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(residual_E1(pt, P));
        benchmark::DoNotOptimize(residual_E2(pt, P));
    }
}
BENCHMARK(bm_residuals);

void bm_h_xx(benchmark::State& state) {
    const parameter_set P = trig_ref();
    const curve_point pt{0.3, 0.7, 1.1};
    for (auto _ : state) benchmark::DoNotOptimize(h_xx_from_ode(pt, P));
}
BENCHMARK(bm_h_xx);

void bm_trace(benchmark::State& state) {
    const parameter_set P = trig_ref();
    for (auto _ : state) {
        metric_profile prof = trace_profile(P, {0.0, 1.0, 1.0}, -0.4, 1.0, 1e-12);
        benchmark::DoNotOptimize(prof.max_E1);
    }
}
BENCHMARK(bm_trace);

void bm_observable_eval(benchmark::State& state) {
    const metric_profile prof = trace_profile(trig_ref(), {0.0, 1.0, 1.0}, -0.4, 1.0, 1e-12);
    const observable_set obs(prof);
    const std::size_t iF = obs.index("F+");
    const phase_point pt{0.3, 0.2, 0.4, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(obs.eval(iF, pt).value);
}
BENCHMARK(bm_observable_eval);

void bm_bracket(benchmark::State& state) {
    const metric_profile prof = trace_profile(trig_ref(), {0.0, 1.0, 1.0}, -0.4, 1.0, 1e-12);
    const observable_set obs(prof);
    const std::size_t iL = obs.index("L"), iF = obs.index("F+");
    const phase_point pt{0.3, 0.2, 0.4, 0.8};
    for (auto _ : state) {
        const observable L = obs.eval(iL, pt);
        const observable F = obs.eval(iF, pt);
        benchmark::DoNotOptimize(poisson_bracket(L, F));
    }
}
BENCHMARK(bm_bracket);

void bm_flow(benchmark::State& state) {
    const metric_profile prof = trace_profile(trig_ref(), {0.0, 1.0, 1.0}, -0.4, 1.0, 1e-12);
    flow_options opt;
    opt.t_end = 1.0;
    opt.dt_sample = 0.1;
    opt.tol = 1e-10;
    for (auto _ : state) {
        flow_result fl = integrate_flow(prof, {0.3, 0.0, 0.1, 0.9}, opt);
        benchmark::DoNotOptimize(fl.t_final);
    }
}
BENCHMARK(bm_flow);

} // namespace

BENCHMARK_MAIN();
