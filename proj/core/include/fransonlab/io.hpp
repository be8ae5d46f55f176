#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fransonlab/detection.hpp"
#include "fransonlab/fringe_fit.hpp"
#include "fransonlab/histogram.hpp"
#include "fransonlab/path_sum.hpp"

namespace fransonlab {

// Fringe records: header phase_rad,counts,starts,integration_s
void write_fringe_csv(std::ostream& out, std::span<const FringeRecord> records);
std::vector<FringeRecord> read_fringe_csv(std::istream& in);

// Time tags: header channel,time_ps, integer picoseconds
void write_time_tags_csv(std::ostream& out, std::span<const TimeTagStream> streams);
std::vector<TimeTagStream> read_time_tags_csv(std::istream& in);

// TAC histogram: header bin_center_ps,count
void write_histogram_csv(std::ostream& out, const TacHistogram& hist);

// Plot data: header phase_rad,counts,fit_value
void write_fit_curve_csv(std::ostream& out, std::span<const FringeRecord> records,
                         const FringeFit& fit);

// Path table: header path,delay_ps,port,re,im,prob plus a totals row
void write_path_table_csv(std::ostream& out, std::span<const JointPath> paths);

std::string fringe_fit_json(const FringeFit& fit);

}  // namespace fransonlab
