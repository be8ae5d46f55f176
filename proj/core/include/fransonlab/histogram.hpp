#pragma once

#include <cstdint>
#include <vector>

#include "fransonlab/detection.hpp"
#include "fransonlab/units.hpp"

namespace fransonlab {

/// Start-stop time-difference histogram. Bin k covers
/// [k*bin_width, (k+1)*bin_width) for k in [-half_bins, half_bins); the right
/// edge of the range is folded into the last bin. Bin edges are exact
/// multiples of the bin width.
struct TacHistogram {
  std::int64_t bin_width_ps = 0;
  std::int64_t half_bins = 0;              // bins per side
  std::vector<std::int64_t> counts;        // size 2*half_bins

  std::int64_t range_ps() const { return half_bins * bin_width_ps; }
  double bin_center_ps(std::size_t index) const;
  std::int64_t total() const;
  void merge_from(const TacHistogram& other);
};

/// For each start, the first stop within [start - range, start + range]
/// contributes one count at the bin of (stop - start). Each start contributes
/// at most one count.
TacHistogram tac_histogram(const TimeTagStream& start, const TimeTagStream& stop,
                           Duration bin_width, Duration range);

/// Sum of the bins whose centers lie within [center - half_width,
/// center + half_width]. The window must lie inside the histogram range.
std::int64_t select_window(const TacHistogram& hist, Duration center, Duration half_width);

}  // namespace fransonlab
