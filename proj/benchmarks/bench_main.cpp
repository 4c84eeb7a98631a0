#include <benchmark/benchmark.h>

#include "radwalk/clt_experiments.hpp"
#include "radwalk/gaussian_moments.hpp"
#include "radwalk/kron_algebra.hpp"
#include "radwalk/radial_measures.hpp"

using namespace radwalk;

namespace {

RadialLaw two_point() { return RadialLaw::two_point_squared(1.0, 0.5, 3.0); }

void BM_OrbitSample(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const std::size_t q = static_cast<std::size_t>(state.range(1));
  const SymMat r = SymMat::identity(q);
  RandomStream rng(1);
  Mat x;
  for (auto _ : state) {
    sample_uniform_orbit_into(p, r, rng, x);
    benchmark::DoNotOptimize(x.data().data());
  }
}
BENCHMARK(BM_OrbitSample)->Args({50, 1})->Args({1000, 1})->Args({1000, 2});

// one trial of the walk, direct and O(n) paths
void BM_WalkTrial(benchmark::State& state) {
  WalkConfig cfg(two_point());
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.p = static_cast<std::size_t>(state.range(1));
  cfg.fast_path = state.range(2) != 0;
  RandomStream rng(2);
  for (auto _ : state) {
    auto t = cfg.fast_path ? fast_walk_trial_q1(cfg, rng) : run_walk_trial(cfg, rng);
    benchmark::DoNotOptimize(t.xi.data());
  }
}
BENCHMARK(BM_WalkTrial)->Args({100, 1000, 0})->Args({100, 1000, 1})->Args({10000, 100, 1});

void BM_WickMoment(benchmark::State& state) {
  const unsigned k = static_cast<unsigned>(state.range(0));
  Mat a(4, 4, {2, 1, 0, 0, 1, 2, 1, 0, 0, 1, 2, 1, 0, 0, 1, 2});
  const auto spec = MatrixNormalSpec::centered(2, SymMat(a));
  MomentIndex idx;
  for (unsigned i = 0; i < k; ++i) idx.push_back({i % 2, (i / 2) % 2});
  for (auto _ : state) benchmark::DoNotOptimize(wick_moment(spec, idx));
}
BENCHMARK(BM_WickMoment)->DenseRange(2, 8, 2);

void BM_KronPower(benchmark::State& state) {
  Mat a(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const unsigned k = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    Mat m = kron_power(a, k);
    benchmark::DoNotOptimize(m.data().data());
  }
}
BENCHMARK(BM_KronPower)->DenseRange(2, 5);

}  // namespace

BENCHMARK_MAIN();
