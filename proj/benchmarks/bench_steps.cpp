#include <benchmark/benchmark.h>

#include "ding/bridge.hpp"
#include "ding/guidance.hpp"
#include "fixtures.hpp"

namespace ding {
namespace {

// One guided step t = 0.5 -> s = 0.49 in d = range(0), 4 components.
void BM_Step(benchmark::State& state, Method method) {
    const auto prior = bench::make_prior(state.range(0), 4, false);
    const InpaintingProblem problem = bench::make_problem(*prior);
    const GmmDenoiser denoiser(prior, Schedule());
    SamplerConfig cfg;
    cfg.method = method;
    cfg.dps_scale = 0.1;
    const BridgeKernel kernel(cfg.eta);
    const StepContext ctx{problem, kernel, denoiser, cfg};
    RandomStream rng(5);
    const Eigen::VectorXd x = rng.gaussian(prior->dim());
    for (auto _ : state) {
        benchmark::DoNotOptimize(guided_step(ctx, x, 0.49, 0.5, rng).data());
    }
}
BENCHMARK_CAPTURE(BM_Step, ding, Method::Ding)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Step, dps, Method::Dps)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Step, ddnm, Method::Ddnm)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Step, diffpir, Method::DiffPir)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_Step, blended, Method::Blended)->Arg(8)->Arg(64);

// Full chains: 100 steps, range(0) chains, d = 8.
void BM_RunConditionalDing(benchmark::State& state) {
    const auto prior = bench::make_prior(8, 2, true);
    const InpaintingProblem problem = bench::make_problem(*prior);
    const GmmDenoiser denoiser(prior, Schedule());
    SamplerConfig cfg;
    cfg.grid = make_grid(100);
    cfg.n_chains = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_conditional(problem, denoiser, cfg).samples.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunConditionalDing)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ding
