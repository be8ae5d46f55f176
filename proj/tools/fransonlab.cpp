// Command-line front end: run phase scans, dump the path-sum table, report the
// physical validation checks, and fit recorded fringes.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "fransonlab/config.hpp"
#include "fransonlab/experiment.hpp"
#include "fransonlab/io.hpp"
#include "fransonlab/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using fransonlab::EngineKind;
using nlohmann::json;

std::string iso8601_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream out;
  out << "0x" << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

fransonlab::LoadedConfig load_with_overrides(const std::string& path,
                                             const std::optional<std::uint64_t>& seed,
                                             const std::optional<std::string>& engine) {
  std::ifstream in(path);
  if (!in) {
    throw fransonlab::ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const json::parse_error& err) {
    throw fransonlab::ConfigError(std::string("JSON parse error: ") + err.what());
  }
  if (!root.is_object()) {
    throw fransonlab::ConfigError("config root must be an object");
  }
  if (seed) {
    root["run"]["seed"] = *seed;
  }
  if (engine) {
    root["run"]["engine"] = *engine;
  }
  return fransonlab::load_config_json(root.dump());
}

json rates_json(const fransonlab::RateReport& r) {
  return json{{"source_pair_rate_hz", r.source_pair_rate_hz},
              {"filtered_pair_rate_hz", r.filtered_pair_rate_hz},
              {"trigger_signal_hz", r.trigger_signal_hz},
              {"trigger_dark_hz", r.trigger_dark_hz},
              {"start_rate_hz", r.start_rate_hz},
              {"dead_time_throughput", r.dead_time_throughput},
              {"coincidence_hz_mean", r.coincidence_hz_mean},
              {"true_window_hz_mean", r.true_window_hz_mean},
              {"accidental_window_hz", r.accidental_window_hz},
              {"accidental_to_true", r.accidental_to_true}};
}

json temporal_rates_json(const fransonlab::TemporalRates& r) {
  return json{{"launched_mu", r.launched_mu},
              {"mu_at_interferometer", r.mu_at_interferometer},
              {"central_flux_bright", r.central_flux_bright},
              {"click_probability_bright", r.click_probability_bright},
              {"click_probability_dark", r.click_probability_dark},
              {"mean_click_rate_hz", r.mean_click_rate_hz},
              {"spool_round_trip_s", r.spool_round_trip.s()},
              {"sp_transit_s", r.sp_transit.s()},
              {"delay_lifetime_ratio", r.delay_lifetime_ratio}};
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& engine_flag, const std::string& out_dir,
            bool do_fit) {
  fransonlab::LoadedConfig config;
  try {
    config = load_with_overrides(config_path, seed, engine_flag);
  } catch (const fransonlab::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  }

  const std::string started = iso8601_utc_now();
  fransonlab::ScanResult result;
  json extra;
  try {
    if (std::holds_alternative<fransonlab::FransonExperiment>(config.experiment)) {
      const auto& e = std::get<fransonlab::FransonExperiment>(config.experiment);
      result = fransonlab::run_franson_scan(e, config.engine);
      extra["rates"] = rates_json(result.rates);
      if (result.stats.simulated_seconds > 0.0) {
        extra["montecarlo_stats"] = {
            {"trigger_signal_clicks", result.stats.trigger_signal_clicks},
            {"trigger_dark_clicks", result.stats.trigger_dark_clicks},
            {"starts", result.stats.starts},
            {"coincidences", result.stats.coincidences},
            {"simulated_seconds", result.stats.simulated_seconds}};
      }
    } else {
      const auto& e = std::get<fransonlab::TemporalExperiment>(config.experiment);
      result = fransonlab::run_temporal_superposition_scan(e, config.engine);
      extra["rates"] = temporal_rates_json(fransonlab::derive_temporal_rates(e));
    }
  } catch (const std::exception& err) {
    std::cerr << "run error: " << err.what() << "\n";
    return kExitRuntime;
  }

  try {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> outputs;
    auto emit = [&](const std::vector<fransonlab::FringeRecord>& records,
                    const char* engine_label) {
      if (records.empty()) {
        return;
      }
      const std::string csv_name = std::string("fringe_") + engine_label + ".csv";
      std::ofstream csv(std::filesystem::path(out_dir) / csv_name);
      fransonlab::write_fringe_csv(csv, records);
      outputs.push_back(csv_name);
      if (do_fit) {
        const fransonlab::FringeFit fit = fransonlab::fit_fringe(records);
        const std::string fit_name = std::string("fit_") + engine_label + ".json";
        std::ofstream fit_out(std::filesystem::path(out_dir) / fit_name);
        fit_out << fransonlab::fringe_fit_json(fit) << "\n";
        outputs.push_back(fit_name);
        const std::string curve_name = std::string("plot_") + engine_label + ".csv";
        std::ofstream curve(std::filesystem::path(out_dir) / curve_name);
        fransonlab::write_fit_curve_csv(curve, records, fit);
        outputs.push_back(curve_name);
        std::cout << engine_label << ": V = " << fit.visibility << " +- " << fit.sigma_visibility
                  << "\n";
      }
    };
    emit(result.analytic, "analytic");
    emit(result.montecarlo, "montecarlo");

    json manifest;
    manifest["tool"] = std::string("fransonlab ") + fransonlab::version_string;
    manifest["preset"] = config.preset;
    manifest["engine"] = fransonlab::engine_name(config.engine);
    manifest["config_path"] = config_path;
    manifest["config_hash_fnv1a64"] = hash_hex(config.hash);
    manifest["resolved_config"] = json::parse(config.resolved_json);
    manifest["outputs"] = outputs;
    manifest["started_utc"] = started;
    manifest["finished_utc"] = iso8601_utc_now();
    for (const auto& [key, value] : extra.items()) {
      manifest[key] = value;
    }
    std::ofstream meta(std::filesystem::path(out_dir) / "metadata.json");
    meta << manifest.dump(2) << "\n";
    std::cout << "wrote " << outputs.size() + 1 << " files to " << out_dir << "\n";
  } catch (const std::exception& err) {
    std::cerr << "output error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_path) {
  fransonlab::LoadedConfig config;
  try {
    config = load_with_overrides(config_path, std::nullopt, std::nullopt);
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  }
  try {
    fransonlab::OpticalCircuit circuit;
    if (std::holds_alternative<fransonlab::FransonExperiment>(config.experiment)) {
      auto e = std::get<fransonlab::FransonExperiment>(config.experiment);
      e.circuit.phase_b_rad = e.scan.start_rad;
      circuit = fransonlab::build_franson_circuit(e.circuit);
    } else {
      auto e = std::get<fransonlab::TemporalExperiment>(config.experiment);
      e.circuit.phase_rad = e.scan.start_rad;
      circuit = fransonlab::build_temporal_circuit(e.circuit);
    }
    const auto paths = fransonlab::enumerate_paths(circuit);
    if (out_path.empty()) {
      fransonlab::write_path_table_csv(std::cout, paths);
    } else {
      std::ofstream out(out_path);
      fransonlab::write_path_table_csv(out, paths);
    }
  } catch (const std::exception& err) {
    std::cerr << "oracle error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  fransonlab::LoadedConfig config;
  try {
    config = load_with_overrides(config_path, std::nullopt, std::nullopt);
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  }
  std::vector<fransonlab::PhysicsCheck> checks;
  if (std::holds_alternative<fransonlab::FransonExperiment>(config.experiment)) {
    checks = fransonlab::physics_checks(std::get<fransonlab::FransonExperiment>(config.experiment));
  } else {
    checks =
        fransonlab::physics_checks(std::get<fransonlab::TemporalExperiment>(config.experiment));
  }
  std::cout << "preset: " << config.preset << "\n";
  std::cout << "config hash: " << hash_hex(config.hash) << "\n";
  for (const auto& check : checks) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
              << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "config error: cannot open fringe CSV: " << csv_path << "\n";
    return kExitConfig;
  }
  try {
    const auto records = fransonlab::read_fringe_csv(in);
    const fransonlab::FringeFit fit = fransonlab::fit_fringe(records);
    const std::string text = fransonlab::fringe_fit_json(fit);
    if (out_path.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream out(out_path);
      out << text << "\n";
    }
  } catch (const std::exception& err) {
    std::cerr << "fit error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plasmon interferometry simulator"};
  app.set_version_flag("--version", std::string(fransonlab::version_string));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string out_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  bool do_fit = false;

  auto* run = app.add_subcommand("run", "Run a phase scan and write fringe records");
  run->add_option("config", config_path, "config JSON path")->required();
  run->add_option("--seed", seed, "override the run seed");
  run->add_option("--engine", engine, "analytic|montecarlo|both")
      ->check(CLI::IsMember({"analytic", "montecarlo", "both"}));
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_flag("--fit", do_fit, "also fit each fringe and write the fit JSON");

  auto* oracle = app.add_subcommand("oracle", "Print the enumerated path table as CSV");
  oracle->add_option("config", config_path, "config JSON path")->required();
  oracle->add_option("--out", out_path, "write to a file instead of stdout");

  auto* validate = app.add_subcommand("validate", "Report the physical validation checks");
  validate->add_option("config", config_path, "config JSON path")->required();

  auto* fit = app.add_subcommand("fit", "Fit a fringe CSV and print the result JSON");
  fit->add_option("csv", csv_path, "fringe CSV path")->required();
  fit->add_option("--out", out_path, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return cmd_run(config_path, seed, engine, out_dir, do_fit);
  }
  if (oracle->parsed()) {
    return cmd_oracle(config_path, out_path);
  }
  if (validate->parsed()) {
    return cmd_validate(config_path);
  }
  if (fit->parsed()) {
    return cmd_fit(csv_path, out_path);
  }
  return 0;
}
