#include "fransonlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace fransonlab {

std::vector<double> ScanSettings::phases() const {
  if (steps < 2) {
    throw std::invalid_argument("phase scan needs at least 2 steps");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  const double step = (stop_rad - start_rad) / static_cast<double>(steps);
  for (int i = 0; i < steps; ++i) {
    out.push_back(start_rad + step * static_cast<double>(i));
  }
  return out;
}

int worker_thread_limit() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) {
    hw = 1;
  }
  if (const char* env = std::getenv("FRANSONLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) {
      return static_cast<int>(std::min<long>(v, hw));
    }
  }
  return hw;
}

namespace {

template <typename Fn>
void run_sharded(int shards, Fn&& fn) {
  const int threads = std::min(worker_thread_limit(), shards);
  if (threads <= 1) {
    for (int s = 0; s < shards; ++s) {
      fn(s);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int s = next.fetch_add(1); s < shards; s = next.fetch_add(1)) {
        fn(s);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
}

// ---------------------------------------------------------------------------
// Two-photon experiment
// ---------------------------------------------------------------------------

// Closed-form budget of the two-photon experiment; the analytic engine and the
// rate report are built from this, never from the path enumeration.
struct FransonBudget {
  OpticalCircuit circuit0;  // phases enter the closed form as arguments
  double coherence_length_m = 0.0;
  double mismatch_overlap = 1.0;
  double p1_arrival = 0.0;  // per filtered pair
  double p2_arrival = 0.0;
  double p_early = 0.0;
  double p_late = 0.0;
  double phase_a = 0.0;

  double p_central(double phase_b) const {
    return franson_joint_probability(phase_a, phase_b, FransonPeak::central, circuit0,
                                     mismatch_overlap);
  }
  double p_central_mean() const {
    return 0.5 * (p_central(0.0) + p_central(constants::pi));
  }
};

FransonBudget make_budget(const FransonParams& params) {
  FransonBudget b;
  FransonParams p0 = params;
  p0.phase_b_rad = 0.0;
  b.circuit0 = build_franson_circuit(p0);
  b.phase_a = params.phase_a_rad;
  b.coherence_length_m = coherence_length_in_medium(
      coherence_time(params.filter.filter.center, params.filter.filter.fwhm_m), params.medium);
  b.mismatch_overlap = gaussian_overlap(params.imbalance_mismatch_m, b.coherence_length_m);
  const double t_pair = params.filter.pair_transmission();
  b.p1_arrival =
      t_pair * params.trigger_channel_transmission * params.trigger_psw.transmission * 0.5;
  b.p2_arrival =
      t_pair * params.gated_channel_transmission * params.gated_psw.transmission * 0.5;
  b.p_early = franson_joint_probability(b.phase_a, 0.0, FransonPeak::early, b.circuit0);
  b.p_late = franson_joint_probability(b.phase_a, 0.0, FransonPeak::late, b.circuit0);
  return b;
}

// Observable class probabilities extracted from the path-sum state; this is
// the route the Monte Carlo engine samples from.
struct FransonClassTable {
  double p1_arrival = 0.0;
  double p_central = 0.0;
  double p_early = 0.0;
  double p_late = 0.0;
  std::int64_t central_delta_ps = 0;
  std::int64_t imbalance_ps = 0;
};

FransonClassTable franson_classes(const TimeBinState& state, std::int64_t imbalance_ps) {
  FransonClassTable table;
  table.imbalance_ps = imbalance_ps;
  std::vector<std::pair<std::int64_t, double>> coincidences;
  for (const auto& [key, terms] : state.classes()) {
    if (key.size() != 2) {
      continue;
    }
    if (key[0].second == 0) {
      const double p = state.probability(key);
      table.p1_arrival += p;
      if (key[1].second == 0) {
        coincidences.emplace_back(key[1].first, p);
      }
    }
  }
  if (coincidences.empty()) {
    return table;  // nothing reaches both detectors (dark-only configuration)
  }
  if (coincidences.size() != 3) {
    throw CircuitError("expected three coincidence arrival classes, found " +
                       std::to_string(coincidences.size()));
  }
  std::sort(coincidences.begin(), coincidences.end());
  table.p_early = coincidences[0].second;
  table.p_central = coincidences[1].second;
  table.p_late = coincidences[2].second;
  table.central_delta_ps = coincidences[1].first;
  if (coincidences[0].first != table.central_delta_ps - imbalance_ps ||
      coincidences[2].first != table.central_delta_ps + imbalance_ps) {
    throw CircuitError("coincidence classes are not spaced by the analyzer imbalance");
  }
  return table;
}

}  // namespace

void validate_experiment(const FransonExperiment& e) {
  e.trigger_detector.validate();
  e.gated_detector.validate();
  if (e.trigger_detector.mode != DetectorMode::passive) {
    throw std::invalid_argument("trigger detector must run in passive mode");
  }
  if (e.gated_detector.mode != DetectorMode::gated || !(e.gated_detector.gate_width.s() > 0.0)) {
    throw std::invalid_argument(
        "stop detector must be gated with a positive gate width (a gated stop needs the "
        "trigger chain)");
  }
  if (e.system_dead_time.s() < 0.0) {
    throw std::invalid_argument("system dead time must be non-negative");
  }
  if (!(e.integration_time_s > 0.0)) {
    throw std::invalid_argument("integration time must be positive");
  }
  if (e.scan.steps < 2) {
    throw std::invalid_argument("phase scan needs at least 2 steps");
  }
  if (e.shards < 1) {
    throw std::invalid_argument("at least one shard is required");
  }
  if (e.pair_rate_hz == 0.0 && !(e.target_trigger_singles_hz > 0.0)) {
    throw std::invalid_argument("either a pair rate or a trigger singles target is required");
  }
  if (!(e.circuit.imbalance.s() > 0.0)) {
    throw std::invalid_argument("analyzer imbalance must be positive");
  }
  if (!(e.tac.window_half_width.s() > 0.0) ||
      e.tac.window_half_width.s() >= e.tac.range.s()) {
    throw std::invalid_argument("analysis window must be positive and inside the TAC range");
  }
  if (2.0 * e.tac.window_half_width.s() > e.gated_detector.gate_width.s()) {
    throw std::invalid_argument("analysis window must fit inside the stop detector gate");
  }
}

namespace {

double safe_div(double a, double b) { return b > 0.0 ? a / b : 0.0; }

double filtered_coherence_length_m(const FransonParams& p) {
  return coherence_length_in_medium(coherence_time(p.filter.filter.center, p.filter.filter.fwhm_m),
                                    p.medium);
}

std::string format_length_mm(double meters) {
  std::ostringstream s;
  s.precision(4);
  s << meters * 1e3 << " mm";
  return s.str();
}

}  // namespace

void require_coherence_criterion(const FransonExperiment& e) {
  // The filtered photons must die inside the waveguides: coherence length
  // smaller than the shortest stripe.
  const double lc = filtered_coherence_length_m(e.circuit);
  const double shortest = std::min(e.circuit.trigger_psw.length_m, e.circuit.gated_psw.length_m);
  if (!(lc < shortest)) {
    throw std::invalid_argument("filtered coherence length (" + format_length_mm(lc) +
                                ") must be smaller than the shortest waveguide (" +
                                format_length_mm(shortest) + ")");
  }
}

std::vector<PhysicsCheck> physics_checks(const FransonExperiment& e) {
  std::vector<PhysicsCheck> checks;
  const double lc = filtered_coherence_length_m(e.circuit);
  const double shortest = std::min(e.circuit.trigger_psw.length_m, e.circuit.gated_psw.length_m);
  checks.push_back({"coherence-length-within-waveguide",
                    "filtered coherence length " + format_length_mm(lc) +
                        " vs shortest waveguide " + format_length_mm(shortest),
                    lc < shortest});

  const double mismatch_ps = e.circuit.source_path_mismatch_m * e.circuit.medium.group_index /
                             constants::speed_of_light_mps * 1e12;
  std::ostringstream sim;
  sim.precision(4);
  sim << "source path mismatch " << format_length_mm(e.circuit.source_path_mismatch_m) << " ("
      << mismatch_ps << " ps excitation offset)";
  checks.push_back({"simultaneous-excitation", sim.str(),
                    e.circuit.source_path_mismatch_m < 1e-3});

  std::ostringstream pump;
  pump.precision(4);
  pump << "pump coherence " << e.circuit.source.pump_coherence_time.ps() << " ps vs imbalance "
       << e.circuit.imbalance.ps() << " ps";
  checks.push_back({"pump-coherence-exceeds-imbalance", pump.str(),
                    e.circuit.source.pump_coherence_time.s() <= 0.0 ||
                        e.circuit.source.pump_coherence_time.s() > e.circuit.imbalance.s()});
  return checks;
}

std::vector<PhysicsCheck> physics_checks(const TemporalExperiment& e) {
  std::vector<PhysicsCheck> checks;
  const double delay_s = 2.0 * e.circuit.spool_one_way_delay.s();
  const double lifetime_s = e.circuit.psw.delay.s();
  const double ratio = delay_s / lifetime_s;
  std::ostringstream r;
  r.precision(6);
  r << "separation " << delay_s * 1e3 << " ms vs plasmon transit " << lifetime_s * 1e12
    << " ps: ratio " << ratio;
  checks.push_back({"delay-exceeds-lifetime-10^7", r.str(), ratio > 1e7});

  std::ostringstream bins;
  bins.precision(4);
  bins << "pulse length " << e.circuit.source.pulse_length.ps() << " ps vs bin separation "
       << e.circuit.mz_imbalance.ps() + e.circuit.psw.delay.ps() << " ps";
  checks.push_back({"arrival-bins-resolve-pulse", bins.str(),
                    e.circuit.source.pulse_length.s() <
                        e.circuit.mz_imbalance.s() + e.circuit.psw.delay.s()});
  return checks;
}

RateReport derive_rates(const FransonExperiment& e) {
  validate_experiment(e);
  require_coherence_criterion(e);
  const FransonBudget b = make_budget(e.circuit);
  const double eta1 = e.trigger_detector.efficiency;
  const double eta2 = e.gated_detector.efficiency;

  RateReport r;
  const double p1_click = b.p1_arrival * eta1;
  if (e.pair_rate_hz <= 0.0 && !(p1_click > 0.0)) {
    throw std::invalid_argument(
        "cannot derive a pair rate from the singles target: the trigger channel never clicks");
  }
  r.source_pair_rate_hz =
      e.pair_rate_hz > 0.0 ? e.pair_rate_hz : e.target_trigger_singles_hz / p1_click;
  r.filtered_pair_rate_hz = r.source_pair_rate_hz * e.circuit.filter.pair_transmission();
  r.trigger_arrival_hz = r.source_pair_rate_hz * b.p1_arrival;
  r.trigger_signal_hz = r.trigger_arrival_hz * eta1;
  r.trigger_dark_hz = e.trigger_detector.dark_rate_hz;
  r.trigger_click_hz = r.trigger_signal_hz + r.trigger_dark_hz;
  r.dead_time_throughput = 1.0 / (1.0 + r.trigger_click_hz * e.system_dead_time.s());
  r.start_rate_hz = r.trigger_click_hz * r.dead_time_throughput;

  r.stop_arrival_uncorrelated_hz = r.source_pair_rate_hz * b.p2_arrival;
  r.stop_click_uncorrelated_hz =
      r.stop_arrival_uncorrelated_hz * eta2 + e.gated_detector.dark_rate_hz;

  const double frac_signal = safe_div(r.trigger_signal_hz, r.trigger_click_hz);
  const double q_central_mean = safe_div(b.p_central_mean(), b.p1_arrival);
  const double q_sides = safe_div(b.p_early + b.p_late, b.p1_arrival);
  r.true_window_hz_mean = r.start_rate_hz * frac_signal * eta2 * q_central_mean;
  r.coincidence_hz_mean =
      r.start_rate_hz * (frac_signal * eta2 * (q_central_mean + q_sides) +
                         r.stop_click_uncorrelated_hz * e.gated_detector.gate_width.s());
  r.accidental_window_hz =
      r.start_rate_hz * r.stop_click_uncorrelated_hz * 2.0 * e.tac.window_half_width.s();
  r.accidental_to_true =
      r.true_window_hz_mean > 0.0 ? r.accidental_window_hz / r.true_window_hz_mean : 0.0;
  return r;
}

namespace {

struct ShardOutcome {
  std::int64_t window_counts = 0;
  long long starts = 0;
  long long signal_clicks = 0;
  long long dark_clicks = 0;
  long long coincidences = 0;
};

struct FransonPointModel {
  double click_rate_hz = 0.0;
  double dark_fraction = 0.0;
  double q_central = 0.0;  // partner-class probabilities given a photon-1 arrival
  double q_early = 0.0;
  double q_late = 0.0;
  double uncorrelated_arrival_hz = 0.0;
  std::int64_t central_delta_ps = 0;
  std::int64_t imbalance_ps = 0;
};

ShardOutcome run_franson_shard(const FransonExperiment& e, const FransonPointModel& m,
                               double duration_s, RandomStream base) {
  RandomStream rng_clicks = base.derive(0);
  RandomStream rng_partner = base.derive(1);
  RandomStream rng_stops = base.derive(2);

  const auto span_ps = static_cast<std::int64_t>(duration_s * 1e12);
  const double gate_width_s = e.gated_detector.gate_width.s();
  const std::int64_t gate_width_ps = e.gated_detector.gate_width.round_ps();
  const std::int64_t gate_delay_ps =
      e.gate_delay ? e.gate_delay->round_ps() : m.central_delta_ps - gate_width_ps / 2;

  if (!(m.click_rate_hz > 0.0)) {
    return {};
  }

  // The trigger click stream is a thinned Poisson process; sample the clicks
  // directly and classify each as photon-induced or dark.
  TimeTagStream raw;
  std::vector<char> is_signal;
  double t_s = 0.0;
  for (;;) {
    t_s += rng_clicks.exponential(m.click_rate_hz);
    const auto tag = static_cast<std::int64_t>(t_s * 1e12);
    if (tag >= span_ps) {
      break;
    }
    raw.times_ps.push_back(tag);
    is_signal.push_back(rng_clicks.bernoulli(m.dark_fraction) ? 0 : 1);
  }

  const TimeTagStream starts = apply_dead_time(raw, e.system_dead_time);

  ShardOutcome out;
  out.starts = static_cast<long long>(starts.times_ps.size());
  for (const char f : is_signal) {
    if (f) {
      ++out.signal_clicks;
    } else {
      ++out.dark_clicks;
    }
  }

  // Partner and uncorrelated arrivals at the stop detector, gate by gate.
  std::vector<Arrival> arrivals;
  std::size_t raw_cursor = 0;
  const double unc_per_gate = m.uncorrelated_arrival_hz * gate_width_s;
  for (const std::int64_t s : starts.times_ps) {
    while (raw_cursor < raw.times_ps.size() && raw.times_ps[raw_cursor] < s) {
      ++raw_cursor;
    }
    const bool signal = is_signal[raw_cursor] != 0;
    ++raw_cursor;

    if (signal) {
      const double u = rng_partner.u01();
      if (u < m.q_central) {
        arrivals.push_back({s + m.central_delta_ps, 1.0});
      } else if (u < m.q_central + m.q_early) {
        arrivals.push_back({s + m.central_delta_ps - m.imbalance_ps, 1.0});
      } else if (u < m.q_central + m.q_early + m.q_late) {
        arrivals.push_back({s + m.central_delta_ps + m.imbalance_ps, 1.0});
      }
    }
    const long long n_unc = rng_partner.poisson(unc_per_gate);
    for (long long k = 0; k < n_unc; ++k) {
      const auto offset =
          static_cast<std::int64_t>(rng_partner.u01() * static_cast<double>(gate_width_ps));
      arrivals.push_back({s + gate_delay_ps + offset, 1.0});
    }
  }
  std::sort(arrivals.begin(), arrivals.end(),
            [](const Arrival& a, const Arrival& b) { return a.time_ps < b.time_ps; });

  const TimeTagStream stops = gated_trigger_chain(
      starts, arrivals, e.gated_detector, Duration::from_ps(static_cast<double>(gate_delay_ps)),
      rng_stops);
  out.coincidences = static_cast<long long>(stops.times_ps.size());

  const TacHistogram hist = tac_histogram(starts, stops, e.tac.bin_width, e.tac.range);
  const Duration window_center =
      e.tac.window_center.value_or(Duration::from_ps(static_cast<double>(m.central_delta_ps)));
  out.window_counts = select_window(hist, window_center, e.tac.window_half_width);
  return out;
}

}  // namespace

ScanResult run_franson_scan(const FransonExperiment& e, EngineKind engine) {
  validate_experiment(e);
  require_coherence_criterion(e);
  ScanResult result;
  result.rates = derive_rates(e);
  const FransonBudget budget = make_budget(e.circuit);
  const std::vector<double> phases = e.scan.phases();
  const double eta2 = e.gated_detector.efficiency;
  const double frac_signal =
      safe_div(result.rates.trigger_signal_hz, result.rates.trigger_click_hz);

  if (engine != EngineKind::montecarlo) {
    for (const double phi : phases) {
      const double q_central = safe_div(budget.p_central(phi), budget.p1_arrival);
      const double per_start =
          frac_signal * eta2 * q_central +
          result.rates.stop_click_uncorrelated_hz * 2.0 * e.tac.window_half_width.s();
      FringeRecord rec;
      rec.phase_rad = phi;
      rec.integration_s = e.integration_time_s;
      rec.counts = result.rates.start_rate_hz * e.integration_time_s * per_start;
      rec.starts =
          static_cast<long long>(std::llround(result.rates.start_rate_hz * e.integration_time_s));
      result.analytic.push_back(rec);
    }
  }

  if (engine == EngineKind::analytic) {
    return result;
  }

  const RandomStream root(e.seed);
  const double shard_duration = e.integration_time_s / static_cast<double>(e.shards);
  for (std::size_t point = 0; point < phases.size(); ++point) {
    FransonParams params = e.circuit;
    params.phase_b_rad = phases[point];
    const OpticalCircuit circuit = build_franson_circuit(params);
    TimeBinState state = evaluate_pair_cw(circuit);
    state = apply_path_mismatch(state, params.imbalance_mismatch_m, budget.coherence_length_m);
    const FransonClassTable classes = franson_classes(state, params.imbalance.round_ps());

    FransonPointModel model;
    model.click_rate_hz = result.rates.source_pair_rate_hz * classes.p1_arrival *
                              e.trigger_detector.efficiency +
                          e.trigger_detector.dark_rate_hz;
    model.dark_fraction = safe_div(e.trigger_detector.dark_rate_hz, model.click_rate_hz);
    model.q_central = safe_div(classes.p_central, classes.p1_arrival);
    model.q_early = safe_div(classes.p_early, classes.p1_arrival);
    model.q_late = safe_div(classes.p_late, classes.p1_arrival);
    model.uncorrelated_arrival_hz = result.rates.stop_arrival_uncorrelated_hz;
    model.central_delta_ps = classes.central_delta_ps;
    model.imbalance_ps = classes.imbalance_ps;

    const RandomStream point_stream = root.derive(point);
    std::vector<ShardOutcome> outcomes(static_cast<std::size_t>(e.shards));
    run_sharded(e.shards, [&](int shard) {
      outcomes[static_cast<std::size_t>(shard)] = run_franson_shard(
          e, model, shard_duration, point_stream.derive(static_cast<std::uint64_t>(shard)));
    });

    FringeRecord rec;
    rec.phase_rad = phases[point];
    rec.integration_s = e.integration_time_s;
    for (const auto& o : outcomes) {
      rec.counts += static_cast<double>(o.window_counts);
      rec.starts += o.starts;
      result.stats.trigger_signal_clicks += o.signal_clicks;
      result.stats.trigger_dark_clicks += o.dark_clicks;
      result.stats.starts += o.starts;
      result.stats.coincidences += o.coincidences;
    }
    result.stats.simulated_seconds += e.integration_time_s;
    result.montecarlo.push_back(rec);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Temporal-superposition experiment
// ---------------------------------------------------------------------------

void validate_experiment(const TemporalExperiment& e) {
  e.detector.validate();
  if (e.detector.mode != DetectorMode::gated || !(e.detector.gate_width.s() > 0.0)) {
    throw std::invalid_argument("the pulse-synchronized detector must be gated");
  }
  if (!(e.mu_at_interferometer > 0.0)) {
    throw std::invalid_argument("mean photon number must be positive");
  }
  if (!(e.pre_interferometer_transmission > 0.0) || e.pre_interferometer_transmission > 1.0) {
    throw std::invalid_argument("pre-interferometer transmission must lie in (0, 1]");
  }
  if (e.pulses_per_point < 1) {
    throw std::invalid_argument("at least one pulse per point is required");
  }
  if (e.scan.steps < 2) {
    throw std::invalid_argument("phase scan needs at least 2 steps");
  }
  if (e.shards < 1) {
    throw std::invalid_argument("at least one shard is required");
  }
  if (!(e.circuit.source.repetition_rate_hz > 0.0)) {
    throw std::invalid_argument("repetition rate must be positive");
  }
  build_temporal_circuit(e.circuit);  // topology checks
}

namespace {

// Coherence scale of the pulse envelope in fiber, the relevant overlap scale
// for residual path mismatch in the auto-compensating arrangement.
double pulse_coherence_length_m(const TemporalParams& params) {
  return constants::speed_of_light_mps * params.source.pulse_length.s() /
         params.medium.group_index;
}

double temporal_click_probability(const TemporalExperiment& e, double central_probability) {
  const double mu_slot = e.mu_at_interferometer * central_probability;
  const double dark_in_gate = e.detector.dark_rate_hz * e.detector.gate_width.s();
  return 1.0 - std::exp(-e.detector.efficiency * mu_slot - dark_in_gate);
}

}  // namespace

TemporalRates derive_temporal_rates(const TemporalExperiment& e) {
  validate_experiment(e);
  TemporalRates r;
  r.mu_at_interferometer = e.mu_at_interferometer;
  r.launched_mu = e.mu_at_interferometer / e.pre_interferometer_transmission;
  r.slots = temporal_slots(e.circuit);
  r.spool_round_trip = 2.0 * e.circuit.spool_one_way_delay;
  r.sp_transit = e.circuit.psw.delay;
  r.delay_lifetime_ratio = r.spool_round_trip.s() / r.sp_transit.s();

  TemporalParams p0 = e.circuit;
  p0.phase_rad = 0.0;
  const OpticalCircuit circuit0 = build_temporal_circuit(p0);
  const double mismatch_overlap =
      gaussian_overlap(e.circuit.path_mismatch_m, pulse_coherence_length_m(e.circuit));
  r.central_flux_bright = plugandplay_central_flux(0.0, circuit0, mismatch_overlap);
  r.click_probability_bright = temporal_click_probability(e, r.central_flux_bright);
  r.click_probability_dark = temporal_click_probability(
      e, plugandplay_central_flux(constants::pi, circuit0, mismatch_overlap));
  const auto& source = std::get<PulsedSource>(circuit0.source);
  r.mean_click_rate_hz = 0.5 * (r.click_probability_bright + r.click_probability_dark) *
                         source.repetition_rate_hz;
  return r;
}

namespace {

struct TemporalShardOutcome {
  std::int64_t counts = 0;
};

TemporalShardOutcome run_temporal_shard(const TemporalExperiment& e, double p_click,
                                        long long pulses, long long first_pulse,
                                        std::int64_t period_ps, std::int64_t slot_ps,
                                        RandomStream rng) {
  // Clicks per block of pulses are binomial; placing them on distinct pulses
  // reproduces the per-pulse Bernoulli process exactly, and the dead-time
  // filter then acts on real tag times.
  TimeTagStream tags;
  long long base = first_pulse;
  long long remaining = pulses;
  const long long block_max =
      std::max<long long>(1, static_cast<long long>(25.0 / std::max(p_click, 1e-12)));
  std::vector<std::int64_t> offsets;
  while (remaining > 0) {
    const long long m = std::min(remaining, std::min<long long>(block_max, 1LL << 26));
    const long long k = rng.binomial(m, p_click);
    offsets.clear();
    while (static_cast<long long>(offsets.size()) < k) {
      const auto cand = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(m)));
      if (std::find(offsets.begin(), offsets.end(), cand) == offsets.end()) {
        offsets.push_back(cand);
      }
    }
    std::sort(offsets.begin(), offsets.end());
    for (const std::int64_t off : offsets) {
      tags.times_ps.push_back((base + off) * period_ps + slot_ps);
    }
    base += m;
    remaining -= m;
  }
  const TimeTagStream kept = apply_dead_time(tags, e.detector.dead_time);
  return {static_cast<std::int64_t>(kept.times_ps.size())};
}

}  // namespace

ScanResult run_temporal_superposition_scan(const TemporalExperiment& e, EngineKind engine) {
  validate_experiment(e);
  ScanResult result;
  const std::vector<double> phases = e.scan.phases();
  const TemporalSlots slots = temporal_slots(e.circuit);
  const double lc = pulse_coherence_length_m(e.circuit);
  const double mismatch_overlap = gaussian_overlap(e.circuit.path_mismatch_m, lc);
  const auto period_ps =
      static_cast<std::int64_t>(std::llround(1e12 / e.circuit.source.repetition_rate_hz));
  const double dead_blocks = e.detector.dead_time.s() * e.circuit.source.repetition_rate_hz;

  if (engine != EngineKind::montecarlo) {
    TemporalParams p0 = e.circuit;
    p0.phase_rad = 0.0;
    const OpticalCircuit circuit0 = build_temporal_circuit(p0);
    for (const double phi : phases) {
      const double p =
          temporal_click_probability(e, plugandplay_central_flux(phi, circuit0, mismatch_overlap));
      // Non-paralyzable thinning on the pulse grid: a click blinds the
      // following dead_time/period pulses.
      const double p_kept = p / (1.0 + dead_blocks * p);
      FringeRecord rec;
      rec.phase_rad = phi;
      rec.counts = static_cast<double>(e.pulses_per_point) * p_kept;
      rec.starts = e.pulses_per_point;
      rec.integration_s =
          static_cast<double>(e.pulses_per_point) / e.circuit.source.repetition_rate_hz;
      result.analytic.push_back(rec);
    }
  }

  if (engine == EngineKind::analytic) {
    return result;
  }

  const RandomStream root(e.seed);
  for (std::size_t point = 0; point < phases.size(); ++point) {
    TemporalParams params = e.circuit;
    params.phase_rad = phases[point];
    TimeBinState state = evaluate_single(build_temporal_circuit(params));
    state = apply_path_mismatch(state, params.path_mismatch_m, lc);
    const double central = state.probability({{slots.central_ps, 0}});
    const double p_click = temporal_click_probability(e, central);

    const RandomStream point_stream = root.derive(point);
    const long long per_shard = e.pulses_per_point / e.shards;
    const long long leftover = e.pulses_per_point % e.shards;
    std::vector<TemporalShardOutcome> outcomes(static_cast<std::size_t>(e.shards));
    std::vector<long long> first_pulse(static_cast<std::size_t>(e.shards));
    std::vector<long long> pulse_count(static_cast<std::size_t>(e.shards));
    long long cursor = 0;
    for (int s = 0; s < e.shards; ++s) {
      pulse_count[static_cast<std::size_t>(s)] = per_shard + (s < leftover ? 1 : 0);
      first_pulse[static_cast<std::size_t>(s)] = cursor;
      cursor += pulse_count[static_cast<std::size_t>(s)];
    }
    run_sharded(e.shards, [&](int shard) {
      const auto idx = static_cast<std::size_t>(shard);
      outcomes[idx] = run_temporal_shard(e, p_click, pulse_count[idx], first_pulse[idx],
                                         period_ps, slots.central_ps,
                                         point_stream.derive(static_cast<std::uint64_t>(shard)));
    });

    FringeRecord rec;
    rec.phase_rad = phases[point];
    rec.starts = e.pulses_per_point;
    rec.integration_s =
        static_cast<double>(e.pulses_per_point) / e.circuit.source.repetition_rate_hz;
    for (const auto& o : outcomes) {
      rec.counts += static_cast<double>(o.counts);
    }
    result.stats.simulated_seconds += rec.integration_s;
    result.montecarlo.push_back(rec);
  }
  return result;
}

}  // namespace fransonlab
