#include "fransonlab/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fransonlab {

void DetectorParams::validate() const {
  if (!(efficiency >= 0.0) || !(efficiency <= 1.0)) {
    throw std::domain_error("detector efficiency must lie in [0, 1]");
  }
  if (dark_rate_hz < 0.0) {
    throw std::domain_error("dark rate must be non-negative");
  }
  if (dead_time.s() < 0.0) {
    throw std::domain_error("dead time must be non-negative");
  }
  if (mode == DetectorMode::gated && gate_width.s() < 0.0) {
    throw std::domain_error("gate width must be non-negative");
  }
}

TimeTagStream detect(std::span<const Arrival> arrivals, const DetectorParams& params,
                     RandomStream& rng, Duration span) {
  params.validate();
  TimeTagStream out;
  if (params.mode == DetectorMode::gated) {
    // No gate schedule here: the detector is never armed.
    return out;
  }

  std::vector<std::int64_t> photon_clicks;
  photon_clicks.reserve(arrivals.size() / 8 + 1);
  std::int64_t previous = INT64_MIN;
  for (const Arrival& a : arrivals) {
    if (a.time_ps < previous) {
      throw std::invalid_argument("arrivals must be sorted by time");
    }
    previous = a.time_ps;
    if (rng.bernoulli(params.efficiency * a.probability)) {
      photon_clicks.push_back(a.time_ps);
    }
  }

  std::vector<std::int64_t> dark_clicks;
  if (params.dark_rate_hz > 0.0 && span.s() > 0.0) {
    const std::int64_t span_ps = span.round_ps();
    double t_ps = 0.0;
    for (;;) {
      t_ps += rng.exponential(params.dark_rate_hz) * 1e12;
      const auto tag = static_cast<std::int64_t>(t_ps);
      if (tag >= span_ps) {
        break;
      }
      dark_clicks.push_back(tag);
    }
  }

  out.times_ps.resize(photon_clicks.size() + dark_clicks.size());
  std::merge(photon_clicks.begin(), photon_clicks.end(), dark_clicks.begin(), dark_clicks.end(),
             out.times_ps.begin());
  return apply_dead_time(out, params.dead_time);
}

TimeTagStream apply_dead_time(const TimeTagStream& tags, Duration dead_time) {
  if (dead_time.s() < 0.0) {
    throw std::domain_error("dead time must be non-negative");
  }
  const std::int64_t dead_ps = dead_time.round_ps();
  if (dead_ps == 0) {
    return tags;
  }
  TimeTagStream out;
  out.channel = tags.channel;
  out.times_ps.reserve(tags.times_ps.size());
  std::int64_t last_kept = INT64_MIN / 2;
  for (const std::int64_t t : tags.times_ps) {
    if (t - last_kept >= dead_ps) {
      out.times_ps.push_back(t);
      last_kept = t;
    }
  }
  return out;
}

TimeTagStream gated_trigger_chain(const TimeTagStream& start,
                                  std::span<const Arrival> stop_arrivals,
                                  const DetectorParams& stop_params, Duration gate_delay,
                                  RandomStream& rng) {
  stop_params.validate();
  if (stop_params.mode != DetectorMode::gated) {
    throw std::invalid_argument("gated_trigger_chain requires a gated stop detector");
  }
  const std::int64_t delay_ps = gate_delay.round_ps();
  const std::int64_t width_ps = stop_params.gate_width.round_ps();
  const double dark_per_gate = stop_params.dark_rate_hz * stop_params.gate_width.s();

  TimeTagStream out;
  out.channel = 1;
  std::size_t cursor = 0;
  std::vector<std::pair<std::int64_t, double>> candidates;  // (time, click probability)
  for (const std::int64_t s : start.times_ps) {
    const std::int64_t gate_open = s + delay_ps;
    const std::int64_t gate_close = gate_open + width_ps;

    candidates.clear();
    while (cursor < stop_arrivals.size() && stop_arrivals[cursor].time_ps < gate_open) {
      ++cursor;
    }
    std::size_t probe = cursor;
    while (probe < stop_arrivals.size() && stop_arrivals[probe].time_ps < gate_close) {
      candidates.emplace_back(stop_arrivals[probe].time_ps,
                              stop_params.efficiency * stop_arrivals[probe].probability);
      ++probe;
    }
    const long long darks = rng.poisson(dark_per_gate);
    for (long long k = 0; k < darks; ++k) {
      const auto offset = static_cast<std::int64_t>(rng.u01() * static_cast<double>(width_ps));
      candidates.emplace_back(gate_open + offset, 1.0);
    }
    std::sort(candidates.begin(), candidates.end());

    for (const auto& [t, p] : candidates) {
      if (rng.bernoulli(p)) {
        out.times_ps.push_back(t);
        break;  // one click per gate
      }
    }
  }
  return apply_dead_time(out, stop_params.dead_time);
}

}  // namespace fransonlab
