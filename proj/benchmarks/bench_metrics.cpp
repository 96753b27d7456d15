#include <benchmark/benchmark.h>

#include "ding/masklift.hpp"
#include "ding/metrics.hpp"
#include "fixtures.hpp"

namespace ding {
namespace {

// range(0) samples on each side, d = 8, 128 projections.
void BM_SlicedW2(benchmark::State& state) {
    const auto prior = bench::make_prior(8, 2, true);
    RandomStream rng(6);
    const Eigen::MatrixXd a = prior->sample(rng, static_cast<std::size_t>(state.range(0)));
    const Eigen::MatrixXd b = prior->sample(rng, static_cast<std::size_t>(state.range(0)));
    const Eigen::MatrixXd dirs = random_directions(8, kDefaultProjections, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sliced_w2(a, b, dirs));
    }
}
BENCHMARK(BM_SlicedW2)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

// Square mask of side range(0), factor range(1), default dilation.
void BM_LiftMask(benchmark::State& state) {
    const std::size_t side = static_cast<std::size_t>(state.range(0));
    const std::size_t f = static_cast<std::size_t>(state.range(1));
    BinaryVolume grid({1, side, side}, 1);
    RandomStream rng(8);
    for (std::size_t i = 0; i < side * side / 50; ++i) {
        grid.set(0, rng.bits() % side, rng.bits() % side, 0);
    }
    const PixelMask mask{grid};
    const LiftFactors factors{1, f, f};
    for (auto _ : state) {
        benchmark::DoNotOptimize(lift_mask(mask, factors, default_dilation(factors)).grid.data().data());
    }
}
BENCHMARK(BM_LiftMask)->Args({64, 8})->Args({512, 8})->Args({1024, 32})->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace ding
