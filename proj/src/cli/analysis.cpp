#include "psd/cli/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "psd/core/errors.hpp"
#include "psd/oscillator/oscillator.hpp"

namespace psd::cli {
namespace {

using nlohmann::json;

json oscillator_defaults(const std::string& kind) {
  if (kind == "oscillator-lindblad")
    return {{"alpha", {1.0, 0.0}}, {"beta", {0.0, 1.0}}, {"omega", 1.0}, {"gamma", 1.0}, {"t", 3.0},
            {"dt", 0.01},          {"n_max", 40},         {"samples", 30}, {"seed", 0}};
  if (kind == "oscillator-superposition")
    return {{"c1", {1.0, 0.0}}, {"alpha", {2.0, 0.0}}, {"c2", {1.0, 0.0}}, {"beta", {-2.0, 0.0}},
            {"omega", 1.0},     {"gamma", 1.0},        {"t", 3.0},         {"dt", 0.01},
            {"n_max", 40},      {"samples", 30},       {"seed", 0}};
  if (kind == "ideal-model")
    return {{"weight", 0.5}, {"relative_phase", 0.0}, {"qubits", 20}, {"kappa_dt", 0.0078539816339744830962},
            {"steps", 100},  {"samples", 10},         {"seed", 0}};
  if (kind == "coherent-completeness") return {{"n_max", 40}, {"radius", 6.0}, {"nodes", 40000}, {"seed", 0}};
  throw InvalidArgument("unknown kind '" + kind + "'");
}

bool same_type(const json& def, const json& v) {
  if (def.is_array()) return v.is_array() && v.size() == def.size() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  return false;
}

Complex complex_of(const ScenarioSpec& s, const std::string& key) {
  const auto& v = s.params.at(key);
  return {v[0].get<double>(), v[1].get<double>()};
}

void require(bool ok, const std::string& constraint, const std::string& detail) {
  if (!ok) throw ResolvabilityError(constraint, detail);
}

void check_oscillator(const ScenarioSpec& s) {
  if (s.kind == "coherent-completeness") {
    require(s.integer("n_max") >= 2, "fock_dimension", "n_max must be at least 2");
    require(s.number("radius") > 0.0 && s.number("radius") * s.number("radius") <= s.integer("n_max"),
            "completeness_radius", "radius² must not exceed n_max");
    require(s.integer("nodes") >= 10000, "completeness_nodes", "at least 10⁴ quadrature nodes");
    return;
  }
  if (s.kind == "ideal-model") {
    require(s.number("weight") > 0.0 && s.number("weight") < 1.0, "weight_range", "weight must lie in (0, 1)");
    require(s.integer("qubits") >= 1 && s.integer("qubits") <= 22, "env_register_size", "1..22 qubits");
    require(s.integer("steps") >= 1, "env_steps", "at least one step");
    require(s.integer("samples") >= 1, "samples", "at least one sample");
    return;
  }
  require(s.integer("n_max") >= 2, "fock_dimension", "n_max must be at least 2");
  require(s.number("gamma") > 0.0, "positive_damping", "gamma must be positive");
  require(s.number("t") >= 0.0, "positive_horizon", "t must be non-negative");
  require(s.number("dt") > 0.0 && s.number("dt") <= 0.01 / std::max(std::abs(s.number("omega")), s.number("gamma")),
          "rk4_step", "dt must lie in (0, 0.01/max(|omega|, gamma)]");
  require(s.integer("samples") >= 1, "samples", "at least one sample");
  for (const char* key : {"alpha", "beta"})
    require(std::norm(complex_of(s, key)) <= s.integer("n_max") / 4.0, "truncation_safety",
            fmt::format("|{}|² must not exceed n_max/4", key));
}

ScenarioResult base_result(const ScenarioSpec& spec) {
  ScenarioResult r;
  r.kind = spec.kind;
  r.spec = spec;
  return r;
}

Verdict at_most(std::string name, double value, double threshold) {
  return {std::move(name), value <= threshold, value, threshold, fmt::format("{:.6g} <= {:.6g}", value, threshold)};
}

ScenarioResult run_lindblad(const ScenarioSpec& spec) {
  const FockSpace space(spec.integer("n_max"));
  const LindbladParams p{spec.number("omega"), spec.number("gamma")};
  const Complex alpha = complex_of(spec, "alpha"), beta = complex_of(spec, "beta");
  const double t_end = spec.number("t"), dt = spec.number("dt");
  const int samples = spec.integer("samples");
  ScenarioResult r = base_result(spec);
  r.columns = {"t", "deviation", "trace_drift", "abs_f", "hermiticity"};
  OscillatorDensityMatrix rho = coherent_projector(alpha, beta, space);
  const Complex trace0 = rho.entries.trace();
  double worst = 0.0, drift = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * k / samples;
    if (k > 0) rho = lindblad_evolve(rho, p, t - rho.time, dt);
    rho.time = t;
    const auto exact = analytic_solution(alpha, beta, p, t, space);
    const double dev = (rho.entries - exact.entries).cwiseAbs().maxCoeff();
    worst = std::max(worst, dev);
    drift = std::max(drift, rho.trace_deviation(trace0));
    r.rows.push_back({t, dev, rho.trace_deviation(trace0), std::abs(decoherence_factor(alpha, beta, p, t)),
                      rho.hermiticity_error()});
  }
  r.observables = {{"max_deviation", worst}, {"trace_drift", drift}};
  r.verdicts.push_back(at_most("analytic_agreement", worst, 1e-6));
  r.verdicts.push_back(at_most("trace_conserved", drift, 1e-8));
  return r;
}

ScenarioResult run_superposition(const ScenarioSpec& spec) {
  const FockSpace space(spec.integer("n_max"));
  const LindbladParams p{spec.number("omega"), spec.number("gamma")};
  const Complex alpha = complex_of(spec, "alpha"), beta = complex_of(spec, "beta");
  Complex c1 = complex_of(spec, "c1"), c2 = complex_of(spec, "c2");
  // normalize |S⟩ = c₁|α⟩ + c₂|β⟩ with the coherent-state overlap
  const double n2 = std::norm(c1) + std::norm(c2) + 2.0 * std::real(std::conj(c1) * c2 * coherent_overlap(alpha, beta));
  if (!(n2 > 0.0)) throw InvalidArgument("superposition has zero norm");
  c1 /= std::sqrt(n2);
  c2 /= std::sqrt(n2);
  const double t_end = spec.number("t");
  const int samples = spec.integer("samples");
  ScenarioResult r = base_result(spec);
  r.columns = {"t", "coherence", "abs_f", "mean_number", "min_eigenvalue"};
  SuperpositionState last;
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * k / samples;
    last = superposition_decoherence(c1, alpha, c2, beta, p, t, space);
    r.rows.push_back({t, last.coherence, std::abs(last.f), last.rho.mean_number(), last.rho.min_eigenvalue()});
  }
  const auto start = superposition_decoherence(c1, alpha, c2, beta, p, 0.0, space);
  LindbladDiagnostics diag;
  const auto numeric = lindblad_evolve(start.rho, p, t_end, spec.number("dt"), &diag);
  const double dev = (numeric.entries - last.rho.entries).cwiseAbs().maxCoeff();
  r.observables = {{"coherence_initial", start.coherence},
                   {"coherence_final", last.coherence},
                   {"abs_f_final", std::abs(last.f)},
                   {"numeric_deviation", dev},
                   {"trace_drift", diag.trace_drift}};
  r.verdicts.push_back(at_most("numeric_agreement", dev, 1e-6));
  r.verdicts.push_back(at_most("trace_conserved", diag.trace_drift, 1e-8));
  return r;
}

ScenarioResult run_ideal(const ScenarioSpec& spec) {
  IdealModelConfig cfg;
  cfg.system_dim = 2;
  cfg.qubits = spec.integer("qubits");
  cfg.kappa_dt = spec.number("kappa_dt");
  const double w = spec.number("weight");
  const Complex c1 = std::sqrt(w), c2 = std::polar(std::sqrt(1.0 - w), spec.number("relative_phase"));
  const int steps = spec.integer("steps"), samples = spec.integer("samples");
  ScenarioResult r = base_result(spec);
  r.columns = {"step", "angle", "env_overlap", "offdiag", "offdiag_oracle", "rho_11", "rho_22"};
  double decay_err = 0.0, diag_err = 0.0, product_err = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(steps) * k / samples));
    const auto st = ideal_model_evolve(cfg, {c1, c2}, n);
    const double oracle = std::abs(c1 * c2) * std::pow(std::abs(std::cos(st.angle)), cfg.qubits);
    decay_err = std::max(decay_err, std::abs(std::abs(st.reduced(0, 1)) - oracle));
    diag_err = std::max({diag_err, std::abs(st.reduced(0, 0) - w), std::abs(st.reduced(1, 1) - (1.0 - w))});
    r.rows.push_back({static_cast<double>(n), st.angle, std::abs(st.env_overlap(0, 1)), std::abs(st.reduced(0, 1)),
                      oracle, st.reduced(0, 0).real(), st.reduced(1, 1).real()});
  }
  // pointer-state inputs stay product: the reduced state is pure
  for (int i = 0; i < 2; ++i) {
    const auto st = ideal_model_evolve(cfg, {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0}, static_cast<std::size_t>(steps));
    product_err = std::max(product_err, std::abs((st.reduced * st.reduced).trace() - 1.0));
  }
  r.observables = {{"decay_error", decay_err}, {"diagonal_error", diag_err}, {"pointer_purity_error", product_err}};
  r.verdicts.push_back(at_most("decay_matches_overlap_product", decay_err, 1e-10));
  r.verdicts.push_back(at_most("diagonal_constant", diag_err, 1e-10));
  r.verdicts.push_back(at_most("pointer_states_stay_product", product_err, 1e-10));
  return r;
}

ScenarioResult run_completeness(const ScenarioSpec& spec) {
  const FockSpace space(spec.integer("n_max"));
  const auto rep = completeness_check(space, spec.number("radius"), static_cast<std::size_t>(spec.integer("nodes")));
  ScenarioResult r = base_result(spec);
  r.columns = {"level", "diagonal"};
  for (int n = 0; n <= rep.sector; ++n) r.rows.push_back({static_cast<double>(n), rep.matrix(n, n).real()});
  r.observables = {{"sector", rep.sector}, {"max_deviation", rep.max_deviation}};
  r.verdicts.push_back(at_most("identity_on_sector", rep.max_deviation, 0.05));
  return r;
}

}  // namespace

std::vector<std::string> oscillator_kinds() {
  return {"oscillator-lindblad", "oscillator-superposition", "ideal-model", "coherent-completeness"};
}

bool is_oscillator_kind(const std::string& kind) {
  const auto k = oscillator_kinds();
  return std::find(k.begin(), k.end(), kind) != k.end();
}

ScenarioSpec resolve_config(const json& config) {
  if (!config.is_object() || !config.contains("kind") || !config["kind"].is_string()) return resolve_spec(config);
  const std::string kind = config["kind"];
  if (!is_oscillator_kind(kind)) return resolve_spec(config);
  ScenarioSpec spec;
  spec.kind = kind;
  spec.params = oscillator_defaults(kind);
  for (const auto& [key, value] : config.items()) {
    if (key == "kind") continue;
    if (!spec.params.contains(key)) throw InvalidArgument("unknown parameter '" + key + "' for " + kind);
    if (!same_type(spec.params[key], value))
      throw InvalidArgument(fmt::format("parameter '{}' must be {}, got {}", key, spec.params[key].type_name(), value.dump()));
    spec.params[key] = value;
  }
  require(spec.integer("seed") >= 0, "seed_range", "seed must be non-negative");
  check_oscillator(spec);
  return spec;
}

ScenarioResult run_config(const ScenarioSpec& spec) {
  if (spec.kind == "oscillator-lindblad") return run_lindblad(spec);
  if (spec.kind == "oscillator-superposition") return run_superposition(spec);
  if (spec.kind == "ideal-model") return run_ideal(spec);
  if (spec.kind == "coherent-completeness") return run_completeness(spec);
  return run_scenario(spec);
}

json parse_config(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(fmt::format("{}:{}:{}: malformed JSON ({})", source, line, column, e.what()));
  }
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string artifact_stem(const ScenarioSpec& spec) {
  return spec.kind + "-" + fnv1a_hex(spec.to_json().dump());
}

Artifacts write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = artifact_stem(result.spec);
  Artifacts out{dir / (stem + ".csv"), dir / (stem + ".json")};
  std::ofstream(out.csv, std::ios::binary) << to_csv(result);
  std::ofstream(out.json, std::ios::binary) << to_json(result).dump(2) << "\n";
  return out;
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const auto& v : values) n *= v.size();
  return n;
}

std::vector<json> SweepGrid::point(std::size_t i) const {
  std::vector<json> p(keys.size());
  for (std::size_t k = keys.size(); k-- > 0;) {
    p[k] = values[k][i % values[k].size()];
    i /= values[k].size();
  }
  return p;
}

SweepGrid parse_sweep_grid(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw ConfigError("sweep grid is empty");
  SweepGrid g;
  for (const auto& [key, values] : grid.items()) {  // object keys iterate sorted
    if (!values.is_array() || values.empty()) throw ConfigError("sweep grid entry '" + key + "' has no values");
    std::vector<json> v(values.begin(), values.end());
    std::stable_sort(v.begin(), v.end());
    g.keys.push_back(key);
    g.values.push_back(std::move(v));
  }
  double n = 1.0;
  for (const auto& v : g.values) n *= static_cast<double>(v.size());
  if (n > 1e4) throw ConfigError(fmt::format("sweep grid has {} points, the limit is 10000", n));
  return g;
}

}  // namespace psd::cli
