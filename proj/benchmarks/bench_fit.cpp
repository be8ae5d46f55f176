#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fransonlab/constants.hpp"
#include "fransonlab/fringe_fit.hpp"

namespace {

void BM_FringeFit(benchmark::State& state) {
  std::vector<fransonlab::FringeRecord> records;
  const auto n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    const double phi = 4.0 * fransonlab::constants::pi * i / n;
    records.push_back({phi, 600.0 * (1.0 + 0.95 * std::cos(phi)), 1000, 1.0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fransonlab::fit_fringe(records));
  }
}
BENCHMARK(BM_FringeFit)->Arg(20)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
