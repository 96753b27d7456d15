#include <benchmark/benchmark.h>

#include "ding/gmm_prior.hpp"
#include "fixtures.hpp"

namespace ding {
namespace {

// Args: dimension, components, diagonal flag.
void BM_Denoise(benchmark::State& state) {
    const auto prior = bench::make_prior(state.range(0), static_cast<std::size_t>(state.range(1)),
                                         state.range(2) != 0);
    const Schedule sched;
    RandomStream rng(3);
    const Eigen::VectorXd x = rng.gaussian(prior->dim());
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm_denoise(*prior, sched, x, 0.4).x0.data());
    }
}
BENCHMARK(BM_Denoise)->Args({8, 2, 1})->Args({8, 2, 0})->Args({64, 8, 1})->Args({64, 8, 0});

void BM_DenoiserJacobian(benchmark::State& state) {
    const auto prior = bench::make_prior(state.range(0), static_cast<std::size_t>(state.range(1)),
                                         state.range(2) != 0);
    const Schedule sched;
    RandomStream rng(4);
    const Eigen::VectorXd x = rng.gaussian(prior->dim());
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm_denoiser_jacobian(*prior, sched, x, 0.4).data());
    }
}
BENCHMARK(BM_DenoiserJacobian)->Args({8, 2, 1})->Args({8, 2, 0})->Args({64, 8, 0});

}  // namespace
}  // namespace ding
