#include "fransonlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fransonlab {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

const char* engine_name(EngineKind engine) {
  switch (engine) {
    case EngineKind::analytic:
      return "analytic";
    case EngineKind::montecarlo:
      return "montecarlo";
    case EngineKind::both:
      return "both";
  }
  return "both";
}

EngineKind parse_engine(const std::string& name) {
  if (name == "analytic") {
    return EngineKind::analytic;
  }
  if (name == "montecarlo") {
    return EngineKind::montecarlo;
  }
  if (name == "both") {
    return EngineKind::both;
  }
  throw ConfigError("engine must be analytic|montecarlo|both, got '" + name + "'");
}

namespace {

// Every default value, spelled out. A config document is deep-merged onto this
// tree, so the resolved echo always carries the full set of keys verbatim.
json franson_defaults() {
  return json{
      {"schema", 1},
      {"preset", "franson_plasmon"},
      {"run",
       {{"seed", 20050773}, {"engine", "both"}, {"shards", 16}, {"phase_start_rad", 0.0},
        {"phase_stop_rad", 12.566370614359172}, {"phase_steps", 20},
        {"integration_time_s", 80.0}}},
      {"medium", {{"fiber_group_index", 1.468}, {"psw_group_velocity_mps", 2.0e8}}},
      {"source",
       {{"pump_wavelength_nm", 773.0}, {"pump_coherence_time_s", 1.0e-6}, {"pair_rate_hz", 0.0},
        {"target_trigger_singles_hz", 20000.0}, {"bandwidth_nm", 80.0}}},
      {"filter", {{"center_nm", 1546.0}, {"fwhm_nm", 0.8}}},
      {"trigger_arm",
       {{"channel_transmission", 0.2}, {"psw_length_mm", 10.0}, {"psw_transmission", 0.5},
        {"channel_delay_ps", 0.0}}},
      {"gated_arm",
       {{"channel_transmission", 0.02}, {"psw_length_mm", 5.0}, {"psw_transmission", 0.5},
        {"channel_delay_ps", 0.0}}},
      {"interferometers",
       {{"imbalance_ps", 1200.0}, {"phase_a_rad", 0.0}, {"imbalance_mismatch_mm", 0.05},
        {"source_path_mismatch_mm", 0.5}}},
      {"detectors",
       {{"trigger",
         {{"efficiency", 0.07}, {"dark_rate_hz", 5000.0}, {"dead_time_s", 0.0},
          {"mode", "passive"}, {"gate_width_s", 0.0}}},
        {"gated",
         {{"efficiency", 0.15}, {"dark_rate_hz", 5000.0}, {"dead_time_s", 0.0}, {"mode", "gated"},
          {"gate_width_s", 2.5e-9}}},
        {"system_dead_time_s", 1.0e-5},
        {"gate_delay_s", nullptr}}},
      {"tac",
       {{"bin_width_s", 1.0e-10}, {"range_s", 3.0e-9}, {"window_half_width_s", 3.0e-10},
        {"window_center_s", nullptr}}},
  };
}

json temporal_defaults() {
  return json{
      {"schema", 1},
      {"preset", "temporal_superposition"},
      {"run",
       {{"seed", 20051546}, {"engine", "both"}, {"shards", 8}, {"phase_start_rad", 0.0},
        {"phase_stop_rad", 12.566370614359172}, {"phase_steps", 20},
        {"pulses_per_point", 10000000}}},
      {"medium", {{"fiber_group_index", 1.468}, {"psw_group_velocity_mps", 2.0e8}}},
      {"source",
       {{"repetition_rate_hz", 5.0e6}, {"pulse_length_s", 1.2e-9},
        {"mean_photon_number_at_interferometer", 1.0}, {"pre_interferometer_transmission", 1.0}}},
      {"interferometer", {{"imbalance_ps", 2400.0}, {"path_mismatch_mm", 0.0}}},
      {"psw", {{"length_mm", 10.0}, {"transmission", 0.5}, {"arm", "long"}}},
      {"spool",
       {{"length_km", 27.0}, {"round_trip_delay_s", 0.0}, {"attenuation_db_per_km", 0.2},
        {"round_trip_transmission", 0.0}}},
      {"detector",
       {{"efficiency", 0.10}, {"dark_rate_hz", 1000.0}, {"dead_time_s", 1.0e-5},
        {"mode", "gated"}, {"gate_width_s", 2.0e-9}}},
  };
}

json strip_sources(const json& j) {
  if (!j.is_object()) {
    return j;
  }
  json out = json::object();
  for (const auto& [key, value] : j.items()) {
    if (key == "sources") {
      continue;
    }
    out[key] = strip_sources(value);
  }
  return out;
}

void deep_merge(json& base, const json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object()) {
      deep_merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

// Typed access into one merged JSON object with unknown-key detection.
class Section {
 public:
  static Section root(const json& j) { return Section(&j, ""); }

  Section child(const std::string& key) {
    used_.insert(key);
    const std::string path = path_ + "/" + key;
    if (!obj_->contains(key) || !obj_->at(key).is_object()) {
      throw ConfigError(path + ": expected an object");
    }
    return Section(&obj_->at(key), path);
  }

  double number(const std::string& key) {
    const json& v = fetch(key);
    if (!v.is_number()) {
      throw ConfigError(path_ + "/" + key + ": expected a number");
    }
    return v.get<double>();
  }

  double nullable_number(const std::string& key, double fallback) {
    const json& v = fetch(key);
    if (v.is_null()) {
      return fallback;
    }
    if (!v.is_number()) {
      throw ConfigError(path_ + "/" + key + ": expected a number or null");
    }
    return v.get<double>();
  }

  long long integer(const std::string& key) {
    const json& v = fetch(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ConfigError(path_ + "/" + key + ": expected an integer");
    }
    return v.get<long long>();
  }

  std::uint64_t uinteger(const std::string& key) {
    const json& v = fetch(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      throw ConfigError(path_ + "/" + key + ": expected a non-negative integer");
    }
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
      throw ConfigError(path_ + "/" + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& key) {
    const json& v = fetch(key);
    if (!v.is_string()) {
      throw ConfigError(path_ + "/" + key + ": expected a string");
    }
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_->items()) {
      if (used_.find(key) == used_.end()) {
        throw ConfigError((path_.empty() ? std::string() : path_) + "/" + key + ": unknown key");
      }
    }
  }

 private:
  Section(const json* obj, std::string path) : obj_(obj), path_(std::move(path)) {}

  const json& fetch(const std::string& key) {
    used_.insert(key);
    if (!obj_->contains(key)) {
      throw ConfigError(path_ + "/" + key + ": missing key");
    }
    return obj_->at(key);
  }

  const json* obj_;
  std::string path_;
  std::set<std::string> used_;
};

struct RunCommon {
  std::uint64_t seed = 1;
  EngineKind engine = EngineKind::both;
  int shards = 4;
  ScanSettings scan;
};

RunCommon parse_run_common(Section& run) {
  RunCommon rc;
  rc.seed = run.uinteger("seed");
  rc.engine = parse_engine(run.text("engine"));
  rc.shards = static_cast<int>(run.integer("shards"));
  rc.scan.start_rad = run.number("phase_start_rad");
  rc.scan.stop_rad = run.number("phase_stop_rad");
  rc.scan.steps = static_cast<int>(run.integer("phase_steps"));
  return rc;
}

void parse_detector(Section& d, DetectorParams& p) {
  p.efficiency = d.number("efficiency");
  p.dark_rate_hz = d.number("dark_rate_hz");
  p.dead_time = Duration::from_s(d.number("dead_time_s"));
  const std::string mode = d.text("mode");
  if (mode == "passive") {
    p.mode = DetectorMode::passive;
  } else if (mode == "gated") {
    p.mode = DetectorMode::gated;
  } else {
    throw ConfigError("detector mode must be passive|gated, got '" + mode + "'");
  }
  p.gate_width = Duration::from_s(d.number("gate_width_s"));
  d.finish();
}

void parse_medium(Section& top, MediumParams& medium) {
  Section m = top.child("medium");
  medium.group_index = m.number("fiber_group_index");
  medium.psw_group_velocity_mps = m.number("psw_group_velocity_mps");
  m.finish();
}

FransonExperiment parse_franson(Section& top, RunCommon& rc) {
  FransonExperiment e;
  Section run = top.child("run");
  rc = parse_run_common(run);
  e.integration_time_s = run.number("integration_time_s");
  run.finish();
  e.seed = rc.seed;
  e.shards = rc.shards;
  e.scan = rc.scan;

  parse_medium(top, e.circuit.medium);

  Section source = top.child("source");
  e.circuit.source.pump = Wavelength::from_nm(source.number("pump_wavelength_nm"));
  e.circuit.source.pump_coherence_time =
      Duration::from_s(source.number("pump_coherence_time_s"));
  e.pair_rate_hz = source.number("pair_rate_hz");
  e.circuit.source.pair_rate_hz = e.pair_rate_hz;
  e.target_trigger_singles_hz = source.number("target_trigger_singles_hz");
  const double bandwidth_nm = source.number("bandwidth_nm");
  source.finish();

  Section filter = top.child("filter");
  const double center_nm = filter.number("center_nm");
  const double fwhm_nm = filter.number("fwhm_nm");
  filter.finish();
  e.circuit.filter.filter = SpectralFilter::bragg(Wavelength::from_nm(center_nm), fwhm_nm * 1e-9);
  e.circuit.filter.source_bandwidth_m = bandwidth_nm * 1e-9;

  auto parse_arm = [&](const char* key, PswChannel& psw, double& channel_t,
                       Duration& channel_delay) {
    Section arm = top.child(key);
    channel_t = arm.number("channel_transmission");
    const double length_mm = arm.number("psw_length_mm");
    const double psw_t = arm.number("psw_transmission");
    channel_delay = Duration::from_ps(arm.number("channel_delay_ps"));
    arm.finish();
    psw = PswChannel::from_length(length_mm * 1e-3, psw_t, e.circuit.medium);
  };
  parse_arm("trigger_arm", e.circuit.trigger_psw, e.circuit.trigger_channel_transmission,
            e.circuit.trigger_channel_delay);
  parse_arm("gated_arm", e.circuit.gated_psw, e.circuit.gated_channel_transmission,
            e.circuit.gated_channel_delay);

  Section ifs = top.child("interferometers");
  e.circuit.imbalance = Duration::from_ps(ifs.number("imbalance_ps"));
  e.circuit.phase_a_rad = ifs.number("phase_a_rad");
  e.circuit.imbalance_mismatch_m = ifs.number("imbalance_mismatch_mm") * 1e-3;
  e.circuit.source_path_mismatch_m = ifs.number("source_path_mismatch_mm") * 1e-3;
  ifs.finish();

  Section detectors = top.child("detectors");
  Section trigger = detectors.child("trigger");
  parse_detector(trigger, e.trigger_detector);
  Section gated = detectors.child("gated");
  parse_detector(gated, e.gated_detector);
  e.system_dead_time = Duration::from_s(detectors.number("system_dead_time_s"));
  const double gd = detectors.nullable_number("gate_delay_s", NAN);
  if (!std::isnan(gd)) {
    e.gate_delay = Duration::from_s(gd);
  }
  detectors.finish();

  Section tac = top.child("tac");
  e.tac.bin_width = Duration::from_s(tac.number("bin_width_s"));
  e.tac.range = Duration::from_s(tac.number("range_s"));
  e.tac.window_half_width = Duration::from_s(tac.number("window_half_width_s"));
  const double wc = tac.nullable_number("window_center_s", NAN);
  if (!std::isnan(wc)) {
    e.tac.window_center = Duration::from_s(wc);
  }
  tac.finish();
  return e;
}

TemporalExperiment parse_temporal(Section& top, RunCommon& rc) {
  TemporalExperiment e;
  Section run = top.child("run");
  rc = parse_run_common(run);
  e.pulses_per_point = run.integer("pulses_per_point");
  run.finish();
  e.seed = rc.seed;
  e.shards = rc.shards;
  e.scan = rc.scan;

  parse_medium(top, e.circuit.medium);

  Section source = top.child("source");
  e.circuit.source.repetition_rate_hz = source.number("repetition_rate_hz");
  e.circuit.source.pulse_length = Duration::from_s(source.number("pulse_length_s"));
  e.mu_at_interferometer = source.number("mean_photon_number_at_interferometer");
  e.pre_interferometer_transmission = source.number("pre_interferometer_transmission");
  e.circuit.source.mean_photon_number = e.mu_at_interferometer;
  source.finish();

  Section interferometer = top.child("interferometer");
  e.circuit.mz_imbalance = Duration::from_ps(interferometer.number("imbalance_ps"));
  e.circuit.path_mismatch_m = interferometer.number("path_mismatch_mm") * 1e-3;
  interferometer.finish();

  Section psw = top.child("psw");
  const double psw_length_mm = psw.number("length_mm");
  const double psw_t = psw.number("transmission");
  const std::string arm = psw.text("arm");
  if (arm != "long" && arm != "short") {
    throw ConfigError("psw arm must be long|short, got '" + arm + "'");
  }
  psw.finish();
  e.circuit.psw = PswChannel::from_length(psw_length_mm * 1e-3, psw_t, e.circuit.medium);
  e.circuit.psw_in_long_arm = arm == "long";

  Section spool = top.child("spool");
  e.spool_length_km = spool.number("length_km");
  const double rt_delay_s = spool.number("round_trip_delay_s");
  e.spool_attenuation_db_per_km = spool.number("attenuation_db_per_km");
  double rt_transmission = spool.number("round_trip_transmission");
  spool.finish();
  const Duration round_trip = rt_delay_s > 0.0
                                  ? Duration::from_s(rt_delay_s)
                                  : spool_round_trip_delay(e.spool_length_km, e.circuit.medium);
  e.circuit.spool_one_way_delay = 0.5 * round_trip;
  if (!(rt_transmission > 0.0)) {
    rt_transmission =
        std::pow(10.0, -e.spool_attenuation_db_per_km * 2.0 * e.spool_length_km / 10.0);
  }
  e.circuit.spool_round_trip_transmission = rt_transmission;

  Section detector = top.child("detector");
  parse_detector(detector, e.detector);
  if (e.detector.mode != DetectorMode::gated) {
    throw ConfigError("the pulse-synchronized detector must be gated");
  }
  return e;
}

LoadedConfig finish_load(const json& user) {
  if (!user.is_object()) {
    throw ConfigError("config root must be an object");
  }
  std::string preset;
  if (user.contains("preset")) {
    if (!user.at("preset").is_string()) {
      throw ConfigError("/preset: expected a string");
    }
    preset = user.at("preset").get<std::string>();
  }
  const bool is_franson = preset == "franson_plasmon";
  const bool is_temporal = preset == "temporal_superposition";
  if (!is_franson && !is_temporal) {
    throw ConfigError("preset must be franson_plasmon|temporal_superposition, got '" + preset +
                      "'");
  }

  json merged = is_franson ? franson_defaults() : temporal_defaults();
  deep_merge(merged, strip_sources(user));

  Section top = Section::root(merged);
  const long long schema = top.integer("schema");
  if (schema != 1) {
    throw ConfigError("unsupported schema version " + std::to_string(schema));
  }
  (void)top.text("preset");

  LoadedConfig out;
  out.preset = preset;
  RunCommon rc;
  if (is_franson) {
    FransonExperiment e = parse_franson(top, rc);
    top.finish();
    validate_experiment(e);
    out.engine = rc.engine;
    out.experiment = std::move(e);
  } else {
    TemporalExperiment e = parse_temporal(top, rc);
    top.finish();
    validate_experiment(e);
    out.engine = rc.engine;
    out.experiment = std::move(e);
  }
  out.resolved_json = merged.dump(2);
  out.hash = fnv1a64(out.resolved_json);
  return out;
}

}  // namespace

LoadedConfig load_config_json(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("JSON parse error: ") + err.what());
  }
  return finish_load(root);
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_config_json(buffer.str());
}

std::string default_config_json(const std::string& preset) {
  const json root = {{"schema", 1}, {"preset", preset}};
  return finish_load(root).resolved_json;
}

}  // namespace fransonlab
