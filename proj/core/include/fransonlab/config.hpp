#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "fransonlab/experiment.hpp"

namespace fransonlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fully-resolved run description. `resolved_json` echoes every value in
/// effect, defaults included, in canonical (sorted-key) form; `hash` is the
/// FNV-1a 64 of that echo, so it is stable under key reordering in the input.
struct LoadedConfig {
  std::string preset;
  std::variant<FransonExperiment, TemporalExperiment> experiment;
  EngineKind engine = EngineKind::both;
  std::string resolved_json;
  std::uint64_t hash = 0;
};

/// Parses and validates a config document. Unknown keys, bad types and value
/// ranges are reported with their JSON path. A minimal document only needs
/// {"schema": 1, "preset": ...}; every other field has a preset default.
LoadedConfig load_config_json(const std::string& json_text);
LoadedConfig load_config_file(const std::string& path);

/// The fully-populated default document for a preset.
std::string default_config_json(const std::string& preset);

std::uint64_t fnv1a64(std::string_view text);

const char* engine_name(EngineKind engine);
EngineKind parse_engine(const std::string& name);

}  // namespace fransonlab
