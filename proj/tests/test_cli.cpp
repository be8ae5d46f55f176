#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fransonlab/fringe_fit.hpp"
#include "fransonlab/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = FRANSONLAB_CLI_PATH;
const std::string presets = FRANSONLAB_PRESET_DIR;

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run_command(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path() / "fransonlab_cli_out.txt";
  const std::string command = cli + " " + args + " > " + tmp.string() + " 2>&1";
  const int raw = std::system(command.c_str());
  CommandResult result;
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(tmp);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "fransonlab_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

}  // namespace

TEST_CASE("run with the analytic engine writes the fringe csv and metadata") {
  const fs::path dir = scratch_dir();
  const std::string config = write_config(dir, "fast.json", R"({
    "schema": 1, "preset": "franson_plasmon",
    "run": {"engine": "analytic", "phase_steps": 20, "integration_time_s": 1.0}
  })");
  const CommandResult r =
      run_command("run " + config + " --out " + (dir / "out").string());
  CHECK(r.status == 0);
  REQUIRE(fs::exists(dir / "out" / "fringe_analytic.csv"));
  REQUIRE(fs::exists(dir / "out" / "metadata.json"));
  std::ifstream csv(dir / "out" / "fringe_analytic.csv");
  const auto records = fransonlab::read_fringe_csv(csv);
  CHECK(records.size() == 20);
}

TEST_CASE("run with both engines produces statistically matching visibilities") {
  const fs::path dir = scratch_dir();
  const std::string config = write_config(dir, "both.json", R"({
    "schema": 1, "preset": "temporal_superposition",
    "run": {"engine": "both", "phase_steps": 12, "pulses_per_point": 2000000, "shards": 4}
  })");
  const CommandResult r = run_command("run " + config + " --seed 42 --out " +
                                      (dir / "out").string() + " --fit");
  CHECK(r.status == 0);
  std::ifstream csv_a(dir / "out" / "fringe_analytic.csv");
  std::ifstream csv_m(dir / "out" / "fringe_montecarlo.csv");
  const auto analytic = fransonlab::read_fringe_csv(csv_a);
  const auto montecarlo = fransonlab::read_fringe_csv(csv_m);
  const auto fit_a = fransonlab::fit_fringe(analytic);
  const auto fit_m = fransonlab::fit_fringe(montecarlo);
  const double sigma = std::hypot(fit_a.sigma_visibility, fit_m.sigma_visibility);
  CHECK(std::abs(fit_a.visibility - fit_m.visibility) < 3.0 * sigma);
  CHECK(fs::exists(dir / "out" / "fit_analytic.json"));
  CHECK(fs::exists(dir / "out" / "fit_montecarlo.json"));
}

TEST_CASE("missing config file exits 2 and leaves no partial outputs") {
  const fs::path dir = scratch_dir();
  const CommandResult r =
      run_command("run " + (dir / "missing.json").string() + " --out " + (dir / "out").string());
  CHECK(r.status == 2);
  CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("invalid config key exits 2 with the offending path named") {
  const fs::path dir = scratch_dir();
  const std::string config = write_config(dir, "bad.json", R"({
    "schema": 1, "preset": "franson_plasmon", "run": {"sheed": 1}
  })");
  const CommandResult r = run_command("run " + config);
  CHECK(r.status == 2);
  CHECK(r.output.find("/run/sheed") != std::string::npos);
}

TEST_CASE("oracle prints the path table with a conserving totals row") {
  const CommandResult r = run_command("oracle " + presets + "/franson.json");
  CHECK(r.status == 0);
  CHECK(r.output.rfind("path,delay_ps,port,re,im,prob", 0) == 0);
  CHECK(r.output.find("total,,,,,1.000000000000") != std::string::npos);

  int joint_detector_rows = 0;
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("D1|D2") != std::string::npos) {
      ++joint_detector_rows;
    }
  }
  CHECK(joint_detector_rows == 4);
}

TEST_CASE("oracle for the temporal preset lists two alternatives in the central bin") {
  const CommandResult r = run_command("oracle " + presets + "/temporal.json");
  CHECK(r.status == 0);
  CHECK(r.output.find("total,,,,,1.000000000000") != std::string::npos);
  // four detector paths, two sharing the interfering slot
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);  // header
  std::map<std::string, int> slot_counts;
  int detector_rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("total", 0) == 0) {
      continue;
    }
    std::istringstream fields(line);
    std::string label;
    std::string delay;
    std::string port;
    std::getline(fields, label, ',');
    std::getline(fields, delay, ',');
    std::getline(fields, port, ',');
    if (port == "D") {
      ++detector_rows;
      ++slot_counts[delay];
    }
  }
  CHECK(detector_rows == 4);
  int shared = 0;
  for (const auto& [slot, count] : slot_counts) {
    if (count == 2) {
      ++shared;
    }
  }
  CHECK(shared == 1);
}

TEST_CASE("validate reports the documented checks") {
  const CommandResult ok = run_command("validate " + presets + "/franson.json");
  CHECK(ok.status == 0);
  CHECK(ok.output.find("[PASS] coherence-length-within-waveguide") != std::string::npos);
  CHECK(ok.output.find("[PASS] simultaneous-excitation") != std::string::npos);
  CHECK(ok.output.find("[PASS] pump-coherence-exceeds-imbalance") != std::string::npos);

  const fs::path dir = scratch_dir();
  const std::string bad = write_config(dir, "mismatch.json", R"({
    "schema": 1, "preset": "franson_plasmon",
    "interferometers": {"source_path_mismatch_mm": 5.0}
  })");
  const CommandResult fail = run_command("validate " + bad);
  CHECK(fail.status == 0);
  CHECK(fail.output.find("[FAIL] simultaneous-excitation") != std::string::npos);

  const std::string long_spool = write_config(dir, "long_spool.json", R"({
    "schema": 1, "preset": "temporal_superposition",
    "spool": {"length_km": 124.0, "round_trip_delay_s": 1.24e-3}
  })");
  const CommandResult ratio = run_command("validate " + long_spool);
  CHECK(ratio.status == 0);
  CHECK(ratio.output.find("[PASS] delay-exceeds-lifetime-10^7") != std::string::npos);
  CHECK(ratio.output.find("2.48e+07") != std::string::npos);
}

TEST_CASE("fit subcommand reproduces a known fringe from csv") {
  const fs::path dir = scratch_dir();
  std::vector<fransonlab::FringeRecord> records;
  for (int i = 0; i < 20; ++i) {
    const double phi = 4.0 * 3.14159265358979 * i / 20.0;
    records.push_back({phi, 600.0 * (1.0 + 0.965 * std::cos(phi)), 100000, 1.0});
  }
  {
    std::ofstream out(dir / "fringe.csv");
    fransonlab::write_fringe_csv(out, records);
  }
  const CommandResult r = run_command("fit " + (dir / "fringe.csv").string());
  CHECK(r.status == 0);
  CHECK(r.output.find("\"visibility\": 0.96") != std::string::npos);

  const CommandResult missing = run_command("fit " + (dir / "nope.csv").string());
  CHECK(missing.status == 2);
}
