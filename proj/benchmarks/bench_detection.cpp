#include <benchmark/benchmark.h>

#include "fransonlab/detection.hpp"
#include "fransonlab/histogram.hpp"
#include "fransonlab/random.hpp"

namespace {

fransonlab::TimeTagStream poisson_stream(double rate_hz, double span_s, std::uint64_t seed) {
  fransonlab::RandomStream rng(seed);
  fransonlab::TimeTagStream tags;
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate_hz);
    if (t >= span_s) {
      break;
    }
    tags.times_ps.push_back(static_cast<std::int64_t>(t * 1e12));
  }
  return tags;
}

void BM_DeadTimeFilter(benchmark::State& state) {
  const auto tags = poisson_stream(25000.0, 40.0, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fransonlab::apply_dead_time(tags, fransonlab::Duration::from_us(10.0)));
  }
}
BENCHMARK(BM_DeadTimeFilter);

void BM_TacHistogram(benchmark::State& state) {
  const auto starts = poisson_stream(20000.0, 20.0, 11);
  auto stops = starts;
  for (auto& t : stops.times_ps) {
    t += 300;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fransonlab::tac_histogram(starts, stops,
                                                       fransonlab::Duration::from_ps(100.0),
                                                       fransonlab::Duration::from_ns(3.0)));
  }
}
BENCHMARK(BM_TacHistogram);

}  // namespace
