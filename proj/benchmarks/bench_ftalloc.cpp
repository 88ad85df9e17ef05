#include <benchmark/benchmark.h>

#include <cmath>

#include "ftalloc/cost_model.hpp"
#include "ftalloc/scalar_min.hpp"
#include "ftalloc/solver.hpp"
#include "ftalloc/verifier.hpp"

using namespace ftalloc;

namespace {

CircuitProfile qaoa() { return load_profile(FTALLOC_CORPUS_DIR "/qaoa_10.json"); }

void BM_Brent(benchmark::State& state) {
  for (auto _ : state) {
    auto r = brent_minimize([](double x) { return std::sin(5.0 * x) + x * x; }, 0.0, 1.0);
    benchmark::DoNotOptimize(r.x_star);
  }
}
BENCHMARK(BM_Brent);

void BM_Estimate(benchmark::State& state) {
  const CircuitProfile p = qaoa();
  const GameConfig cfg;
  const Allocation s = Allocation::make({0.5, 0.3, 0.2}, cfg.eps_min);
  for (auto _ : state) {
    auto e = estimate(s, p, cfg);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_Estimate);

void BM_Solve(benchmark::State& state) {
  const CircuitProfile p = qaoa();
  SyntheticOracle oracle;
  GameConfig cfg;
  cfg.restarts_K = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = solve(oracle, p, cfg);
    benchmark::DoNotOptimize(r.c_star);
  }
}
BENCHMARK(BM_Solve)->Arg(1)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Grid(benchmark::State& state) {
  const CircuitProfile p = qaoa();
  SyntheticOracle oracle;
  const GameConfig cfg;
  for (auto _ : state) {
    auto g = grid_minimize(oracle, p, cfg, 0.002);
    benchmark::DoNotOptimize(g.cost);
  }
}
BENCHMARK(BM_Grid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
