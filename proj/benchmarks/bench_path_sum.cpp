#include <benchmark/benchmark.h>

#include "fransonlab/circuit.hpp"
#include "fransonlab/path_sum.hpp"

namespace {

fransonlab::FransonParams bench_params() {
  fransonlab::FransonParams p;
  p.source.pump_coherence_time = fransonlab::Duration::from_us(1.0);
  p.filter.filter =
      fransonlab::SpectralFilter::bragg(fransonlab::Wavelength::from_nm(1546.0), 0.8e-9);
  p.filter.source_bandwidth_m = 80e-9;
  p.trigger_psw = fransonlab::PswChannel::from_length(10e-3, 0.5, p.medium);
  p.gated_psw = fransonlab::PswChannel::from_length(5e-3, 0.5, p.medium);
  return p;
}

void BM_PairStateEvaluation(benchmark::State& state) {
  fransonlab::FransonParams params = bench_params();
  double phase = 0.0;
  for (auto _ : state) {
    params.phase_b_rad = phase += 0.1;
    const auto circuit = fransonlab::build_franson_circuit(params);
    const auto eval = fransonlab::evaluate_pair_cw(circuit);
    benchmark::DoNotOptimize(eval.total_probability());
  }
}
BENCHMARK(BM_PairStateEvaluation);

void BM_FransonClosedForm(benchmark::State& state) {
  const auto circuit = fransonlab::build_franson_circuit(bench_params());
  double phase = 0.0;
  for (auto _ : state) {
    phase += 0.1;
    benchmark::DoNotOptimize(fransonlab::franson_joint_probability(
        0.0, phase, fransonlab::FransonPeak::central, circuit));
  }
}
BENCHMARK(BM_FransonClosedForm);

}  // namespace
