#pragma once

// JSON run configuration. A config names a built-in model and overrides any
// of its defaults; every key is checked against a fixed schema.

#include <cstdint>
#include <optional>
#include <string>

#include "hadp/builtin_models.hpp"

namespace hadp {

struct DiagConfig {
  int samples = 256;
  std::uint64_t seed = 7;
};

struct RunConfig {
  std::string model;
  Game game;
  TuningParams tuning;
  SimConfig sim;
  DiagConfig diag;
};

/// Parses and validates. Throws ConfigError naming the key or invariant.
/// Also accepts a run manifest, in which case its "config" object is used.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every resolved value as canonical JSON; parse_config(resolved_json(c))
/// reproduces `c`.
std::string resolved_json(const RunConfig& config);

/// 64-bit FNV-1a of the canonical resolved JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Re-seeds every random stream from one run seed.
void apply_seed(RunConfig& config, std::uint64_t seed);

struct ManifestInfo {
  std::string version;
  double runtime_seconds = 0.0;
  std::string status;
  std::optional<double> detector_time;
  long fp_failures = 0;
};

std::string manifest_json(const RunConfig& config, const ManifestInfo& info);

std::string library_version();

}  // namespace hadp
