#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fransonlab/random.hpp"
#include "fransonlab/units.hpp"

namespace fransonlab {

enum class DetectorMode { passive, gated };

struct DetectorParams {
  double efficiency = 1.0;
  double dark_rate_hz = 0.0;
  Duration dead_time;
  DetectorMode mode = DetectorMode::passive;
  Duration gate_width;  // gated mode only

  void validate() const;
};

/// Photon arrival at a detector: absolute time and the probability that a
/// photon is actually present (path probabilities for heralded photons,
/// 1.0 for certain arrivals).
struct Arrival {
  std::int64_t time_ps = 0;
  double probability = 1.0;
};

struct TimeTagStream {
  int channel = 0;
  std::vector<std::int64_t> times_ps;  // strictly increasing
};

/// Stochastic detector: each arrival clicks with probability
/// efficiency * arrival.probability; a passive detector adds dark counts as a
/// Poisson process over [0, span]; dead-time filtering is applied last.
/// A gated-mode detector never clicks here because no gates are scheduled --
/// gate it from a trigger stream with gated_trigger_chain. Deterministic for a
/// given (params, rng) pair; an empty input yields a dark-counts-only stream.
TimeTagStream detect(std::span<const Arrival> arrivals, const DetectorParams& params,
                     RandomStream& rng, Duration span);

/// Greedy non-paralyzable dead-time filter: keeps a tag iff it falls at least
/// dead_time after the last kept tag.
TimeTagStream apply_dead_time(const TimeTagStream& tags, Duration dead_time);

/// Trigger-gated detection: every start tag opens one gate of
/// stop_params.gate_width at start + gate_delay. Stop arrivals and dark counts
/// can click only inside gates, at most one click per gate; the stop
/// detector's own dead time is applied at the end. Gates are assumed not to
/// overlap (start streams that went through a dead-time filter longer than the
/// gate satisfy this).
TimeTagStream gated_trigger_chain(const TimeTagStream& start,
                                  std::span<const Arrival> stop_arrivals,
                                  const DetectorParams& stop_params, Duration gate_delay,
                                  RandomStream& rng);

}  // namespace fransonlab
