#include "fransonlab/histogram.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fransonlab {

double TacHistogram::bin_center_ps(std::size_t index) const {
  const auto k = static_cast<std::int64_t>(index) - half_bins;
  return (static_cast<double>(k) + 0.5) * static_cast<double>(bin_width_ps);
}

std::int64_t TacHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void TacHistogram::merge_from(const TacHistogram& other) {
  if (other.bin_width_ps != bin_width_ps || other.half_bins != half_bins) {
    throw std::invalid_argument("cannot merge histograms with different binning");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    counts[i] += other.counts[i];
  }
}

TacHistogram tac_histogram(const TimeTagStream& start, const TimeTagStream& stop,
                           Duration bin_width, Duration range) {
  const std::int64_t bin_ps = bin_width.round_ps();
  const std::int64_t range_ps = range.round_ps();
  if (bin_ps <= 0 || range_ps <= 0) {
    throw std::domain_error("bin width and range must be positive");
  }
  if (range_ps % bin_ps != 0) {
    throw std::domain_error("range must be an integer number of bins");
  }
  TacHistogram hist;
  hist.bin_width_ps = bin_ps;
  hist.half_bins = range_ps / bin_ps;
  hist.counts.assign(static_cast<std::size_t>(2 * hist.half_bins), 0);

  std::size_t cursor = 0;
  for (const std::int64_t s : start.times_ps) {
    const std::int64_t lo = s - range_ps;
    while (cursor < stop.times_ps.size() && stop.times_ps[cursor] < lo) {
      ++cursor;
    }
    if (cursor >= stop.times_ps.size()) {
      break;
    }
    const std::int64_t t = stop.times_ps[cursor];
    if (t > s + range_ps) {
      continue;
    }
    const std::int64_t d = t - s;
    // floor division towards -inf; the right range edge folds into the last bin
    std::int64_t k = d / bin_ps;
    if (d < 0 && d % bin_ps != 0) {
      --k;
    }
    k = std::min(k, hist.half_bins - 1);
    hist.counts[static_cast<std::size_t>(k + hist.half_bins)] += 1;
  }
  return hist;
}

std::int64_t select_window(const TacHistogram& hist, Duration center, Duration half_width) {
  if (!(half_width.s() > 0.0)) {
    throw std::domain_error("window half-width must be positive");
  }
  const std::int64_t lo = center.round_ps() - half_width.round_ps();
  const std::int64_t hi = center.round_ps() + half_width.round_ps();
  const std::int64_t range = hist.range_ps();
  if (lo < -range || hi > range) {
    throw std::out_of_range("window extends outside the histogram range");
  }
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double c = hist.bin_center_ps(i);
    if (c >= static_cast<double>(lo) && c <= static_cast<double>(hi)) {
      sum += hist.counts[i];
    }
  }
  return sum;
}

}  // namespace fransonlab
