#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "psd/core/errors.hpp"
#include "psd/scenarios/scenario.hpp"

namespace psd {

bool ScenarioResult::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

std::vector<double> ScenarioResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

const Verdict& ScenarioResult::verdict(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return v;
  throw InvalidArgument("no verdict '" + name + "'");
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  if (spec.kind == "barrier-scattering") return run_barrier_scattering(spec);
  if (spec.kind == "beam-splitter") return run_beam_splitter(spec);
  if (spec.kind == "measurement-toy") return run_measurement_toy(spec);
  if (spec.kind == "double-slit-photon") return run_double_slit_photon(spec);
  throw InvalidArgument("unknown scenario kind '" + spec.kind + "'");
}

std::string to_csv(const ScenarioResult& r) {
  std::string out = "# config: " + r.spec.to_json().dump() + "\n";
  for (std::size_t c = 0; c < r.columns.size(); ++c) out += (c ? "," : "") + r.columns[c];
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += fmt::format("{}{:.12g}", c ? "," : "", row[c]);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const ScenarioResult& r) {
  nlohmann::json j;
  j["scenario"] = r.kind;
  j["config"] = r.spec.to_json();
  j["observables"] = r.observables;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back(
        {{"name", v.name}, {"passed", v.passed}, {"value", v.value}, {"threshold", v.threshold}, {"detail", v.detail}});
  j["passed"] = r.passed();
  j["notes"] = r.notes;
  j["columns"] = r.columns;
  if (r.tree) j["tree"] = to_json(*r.tree);
  if (r.tree_verdict) j["tree_verdict"] = to_json(*r.tree_verdict);
  return j;
}

double rectangular_barrier_transmission(double k, double v0, double a, double mass) {
  if (k <= 0.0) return 0.0;
  const double e = k * k / (2.0 * mass);
  if (v0 == 0.0 || a == 0.0) return 1.0;
  const double gap = v0 - e;
  if (std::abs(gap) < 1e-12 * v0) return 1.0 / (1.0 + mass * v0 * a * a / 2.0);
  if (gap > 0.0) {
    const double s = std::sinh(std::sqrt(2.0 * mass * gap) * a);
    return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * gap));
  }
  const double s = std::sin(std::sqrt(-2.0 * mass * gap) * a);
  return 1.0 / (1.0 - v0 * v0 * s * s / (4.0 * e * gap));
}

double packet_transmission(double k0, double width, double v0, double a, double mass) {
  // Simpson over ±8 momentum widths
  const int n = 4000;
  const double lo = k0 - 8.0 / width, h = 16.0 / width / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k = lo + i * h;
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double rho = std::exp(-(k - k0) * (k - k0) * width * width);
    num += wgt * rho * rectangular_barrier_transmission(k, v0, a, mass);
    den += wgt * rho;
  }
  return num / den;
}

}  // namespace psd
