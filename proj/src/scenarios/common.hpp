#pragma once

#include <fmt/format.h>

#include <string>

#include "psd/scenarios/scenario.hpp"

namespace psd::detail {

inline TreeOptions tree_options(const ScenarioSpec& s, double horizon) {
  TreeOptions o;
  o.horizon = horizon;
  o.sample_dt = s.number("sample_dt");
  o.channels = {s.number("theta"), s.number("d_min"), s.number("mass_floor")};
  o.epsilon_w = s.number("epsilon_w");
  o.confirm = s.integer("confirm");
  o.w.seed = static_cast<std::uint64_t>(s.integer("seed"));
  return o;
}

inline Verdict at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold,
          detail.empty() ? fmt::format("{:.6g} <= {:.6g}", value, threshold) : std::move(detail)};
}

inline Verdict at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value >= threshold, value, threshold,
          detail.empty() ? fmt::format("{:.6g} >= {:.6g}", value, threshold) : std::move(detail)};
}

/// Relative density of `psi` in the outer `fraction` of cells along `axis`, both ends.
double edge_mass(const WaveFunction& psi, int axis, double fraction = 0.02);

/// sqrt(∫ min(|a|², |b|²)) / sqrt(min(‖a‖², ‖b‖²)): w of a two-component decomposition.
double pair_w(const std::vector<double>& da, const std::vector<double>& db, double cell_volume);

}  // namespace psd::detail
