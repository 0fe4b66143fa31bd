#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/tree/tree.hpp"

namespace psd {

/// A scenario kind plus its fully resolved parameters (every default materialized).
struct ScenarioSpec {
  std::string kind;
  nlohmann::json params;

  nlohmann::json to_json() const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
};

/// Kinds: barrier-scattering, beam-splitter, measurement-toy, double-slit-photon.
std::vector<std::string> scenario_kinds();

/// Defaults for one kind, as JSON.
nlohmann::json scenario_defaults(const std::string& kind);

/// Merges `config` (an object with a "kind" key) over the defaults and checks
/// types, unknown keys and grid resolvability. Throws InvalidArgument, or
/// ResolvabilityError naming the violated constraint.
ScenarioSpec resolve_spec(const nlohmann::json& config);

struct Verdict {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ScenarioResult {
  std::string kind;
  ScenarioSpec spec;
  std::vector<std::string> columns;  // first column is t; all rows share the sample clock
  std::vector<std::vector<double>> rows;
  std::optional<TreeStructure> tree;
  std::optional<TreeVerdict> tree_verdict;
  nlohmann::json observables = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;  // modeling substitutions worth flagging in reports

  bool passed() const;
  std::vector<double> column(const std::string& name) const;
  const Verdict& verdict(const std::string& name) const;
};

ScenarioResult run_scenario(const ScenarioSpec& spec);
ScenarioResult run_barrier_scattering(const ScenarioSpec& spec);
ScenarioResult run_beam_splitter(const ScenarioSpec& spec);
ScenarioResult run_measurement_toy(const ScenarioSpec& spec);
ScenarioResult run_double_slit_photon(const ScenarioSpec& spec);

/// Time series with a leading "# config: {...}" comment line.
std::string to_csv(const ScenarioResult& result);
nlohmann::json to_json(const ScenarioResult& result);

/// Transmission probability of a rectangular barrier of height v0 and width a at wave number k.
double rectangular_barrier_transmission(double k, double v0, double a, double mass);

/// T averaged over the momentum density exp(−(k−k₀)²σ²) of a Gaussian packet of amplitude width σ.
double packet_transmission(double k0, double width, double v0, double a, double mass);

}  // namespace psd
