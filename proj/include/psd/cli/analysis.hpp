#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/scenarios/scenario.hpp"

namespace psd::cli {

/// Oscillator analyses runnable from a config, next to the scenario kinds:
/// oscillator-lindblad, oscillator-superposition, ideal-model, coherent-completeness.
std::vector<std::string> oscillator_kinds();
bool is_oscillator_kind(const std::string& kind);

/// Scenario or oscillator config with every default materialized.
/// Throws InvalidArgument or ResolvabilityError like resolve_spec.
ScenarioSpec resolve_config(const nlohmann::json& config);

ScenarioResult run_config(const ScenarioSpec& spec);

/// Parses JSON text. Syntax errors become ConfigError with line and column.
nlohmann::json parse_config(const std::string& text, const std::string& source);
nlohmann::json load_config(const std::filesystem::path& path);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// "<kind>-<hash of the resolved config>"
std::string artifact_stem(const ScenarioSpec& spec);

struct Artifacts {
  std::filesystem::path csv;
  std::filesystem::path json;
};

/// Writes <stem>.csv and <stem>.json into `dir` (created if missing).
Artifacts write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

/// Cartesian parameter grid: keys sorted, each key's values in ascending order.
struct SweepGrid {
  std::vector<std::string> keys;
  std::vector<std::vector<nlohmann::json>> values;

  std::size_t size() const;
  /// Point i in lexicographic order (first key varies slowest).
  std::vector<nlohmann::json> point(std::size_t i) const;
};

/// {"base": {...}, "grid": {"key": [v, ...], ...}}. Throws ConfigError on an empty or
/// oversized (> 10⁴ points) grid.
SweepGrid parse_sweep_grid(const nlohmann::json& grid);

}  // namespace psd::cli
