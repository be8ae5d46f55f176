#include "fransonlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fransonlab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

void expect_header(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != expected) {
    throw std::runtime_error("unexpected CSV header '" + line + "', expected '" + expected + "'");
  }
}

}  // namespace

void write_fringe_csv(std::ostream& out, std::span<const FringeRecord> records) {
  out << "phase_rad,counts,starts,integration_s\n";
  out << std::setprecision(15);
  for (const auto& r : records) {
    out << r.phase_rad << ',' << r.counts << ',' << r.starts << ',' << r.integration_s << '\n';
  }
}

std::vector<FringeRecord> read_fringe_csv(std::istream& in) {
  expect_header(in, "phase_rad,counts,starts,integration_s");
  std::vector<FringeRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::runtime_error("malformed fringe CSV row: " + line);
    }
    FringeRecord r;
    r.phase_rad = std::stod(fields[0]);
    r.counts = std::stod(fields[1]);
    r.starts = std::stoll(fields[2]);
    r.integration_s = std::stod(fields[3]);
    records.push_back(r);
  }
  return records;
}

void write_time_tags_csv(std::ostream& out, std::span<const TimeTagStream> streams) {
  out << "channel,time_ps\n";
  for (const auto& s : streams) {
    for (const std::int64_t t : s.times_ps) {
      out << s.channel << ',' << t << '\n';
    }
  }
}

std::vector<TimeTagStream> read_time_tags_csv(std::istream& in) {
  expect_header(in, "channel,time_ps");
  std::vector<TimeTagStream> streams;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw std::runtime_error("malformed time-tag CSV row: " + line);
    }
    const int channel = std::stoi(fields[0]);
    const std::int64_t t = std::stoll(fields[1]);
    auto it = std::find_if(streams.begin(), streams.end(),
                           [&](const TimeTagStream& s) { return s.channel == channel; });
    if (it == streams.end()) {
      streams.push_back(TimeTagStream{channel, {}});
      it = std::prev(streams.end());
    }
    it->times_ps.push_back(t);
  }
  return streams;
}

void write_histogram_csv(std::ostream& out, const TacHistogram& hist) {
  out << "bin_center_ps,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out << hist.bin_center_ps(i) << ',' << hist.counts[i] << '\n';
  }
}

void write_fit_curve_csv(std::ostream& out, std::span<const FringeRecord> records,
                         const FringeFit& fit) {
  out << "phase_rad,counts,fit_value\n";
  out << std::setprecision(15);
  for (const auto& r : records) {
    const double model =
        fit.offset * (1.0 + fit.visibility * std::cos(r.phase_rad + fit.phase0_rad));
    out << r.phase_rad << ',' << r.counts << ',' << model << '\n';
  }
}

void write_path_table_csv(std::ostream& out, std::span<const JointPath> paths) {
  out << "path,delay_ps,port,re,im,prob\n";
  out << std::setprecision(15);
  double total = 0.0;
  for (const auto& p : paths) {
    out << p.label << ',' << p.delays_ps << ',' << p.ports << ',' << p.amplitude.real() << ','
        << p.amplitude.imag() << ',' << p.probability << '\n';
    total += p.probability;
  }
  out << "total,,,,," << std::fixed << std::setprecision(12) << total << '\n';
  out.unsetf(std::ios_base::fixed);
}

std::string fringe_fit_json(const FringeFit& fit) {
  nlohmann::json j = {
      {"offset", fit.offset},
      {"amplitude", fit.amplitude},
      {"phase0_rad", fit.phase0_rad},
      {"visibility", fit.visibility},
      {"sigma_visibility", fit.sigma_visibility},
      {"chi2_reduced", fit.chi2_reduced},
      {"n_points", fit.n_points},
  };
  return j.dump(2);
}

}  // namespace fransonlab
