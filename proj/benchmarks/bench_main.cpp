#include <benchmark/benchmark.h>

#include <random>

#include "weightlab/geometry.hpp"
#include "weightlab/maximal.hpp"
#include "weightlab/sawyer.hpp"
#include "weightlab/tails.hpp"
#include "weightlab/weights.hpp"

using namespace weightlab;

namespace {

std::shared_ptr<const GridWeight> bench_weight(int n, int resolution) {
  std::mt19937_64 rng(42);
  return random_grid_weight(Grid{Cube(n, {0.0, 0.0}, 2.0), resolution}, rng);
}

void BM_HlMaximal1d(benchmark::State& state) {
  const auto w = bench_weight(1, static_cast<int>(state.range(0)));
  const GridFunction f(w->grid(), w->values());
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HlMaximal1d)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_HlMaximal2d(benchmark::State& state) {
  const auto w = bench_weight(2, static_cast<int>(state.range(0)));
  const GridFunction f(w->grid(), w->values());
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f));
}
BENCHMARK(BM_HlMaximal2d)->Arg(64)->Arg(256);

void BM_ContinuousTail(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto w = bench_weight(n, n == 1 ? 4096 : 256);
  const Cube q(n, {0.3, 0.1}, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(continuous_tail(*w, q, 2.0));
}
BENCHMARK(BM_ContinuousTail)->Arg(1)->Arg(2);

void BM_DiscreteTail(benchmark::State& state) {
  const PowerWeight w(1, 0.5);
  const Cube q = Cube::interval(0.5, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_tail(w, q, 2.0));
}
BENCHMARK(BM_DiscreteTail);

void BM_CpConstant(benchmark::State& state) {
  const auto w = bench_weight(1, 1024);
  const CubeFamily fam = enumerate_dyadic(Cube::interval(-2.0, 2.0), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cp_constant(*w, 2.0, fam));
}
BENCHMARK(BM_CpConstant)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Whitney(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g{Cube(n, {0.0, 0.0}, 1.0), n == 1 ? 4096 : 256};
  CellSet omega(g);
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.995);
  for (auto& m : omega.mask) m = coin(rng) ? 1 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(whitney_decompose(omega));
}
BENCHMARK(BM_Whitney)->Arg(1)->Arg(2);

void BM_TruncatedHilbert(benchmark::State& state) {
  const Grid g{Cube::interval(-2.0, 2.0), static_cast<int>(state.range(0))};
  const Signal s = make_signal("chirp", g);
  for (auto _ : state) benchmark::DoNotOptimize(truncated_hilbert_maximal(s.values));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TruncatedHilbert)->RangeMultiplier(2)->Range(1024, 8192)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
