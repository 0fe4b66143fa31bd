#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "psd/core/errors.hpp"
#include "psd/scenarios/scenario.hpp"

namespace psd {
namespace {

using nlohmann::json;

json common_defaults() {
  return {{"seed", 0},         {"epsilon_w", 0.05}, {"sample_dt", 1.0}, {"theta", 0.01},
          {"d_min", 1.0},      {"mass_floor", 1e-3}, {"confirm", 3}};
}

json kind_defaults(const std::string& kind) {
  if (kind == "barrier-scattering")
    return {{"cells", 1024},          {"extent", 256.0},        {"mass", 1.0},          {"dt", 0.005},
            {"packet_center", -50.0}, {"packet_momentum", 2.0}, {"packet_width", 8.0},  {"barrier_center", 0.0},
            {"barrier_height", 2.0},  {"barrier_width", 1.0},   {"horizon", 60.0}};
  if (kind == "beam-splitter")
    return {{"cells_x", 256},          {"cells_y", 256},          {"extent_x", 320.0},     {"extent_y", 64.0},
            {"mass", 1.0},             {"pointer_mass", 20.0},    {"dt", 0.05},            {"packet_center", -40.0},
            {"packet_momentum", 1.5},  {"packet_width", 8.0},     {"pointer_width", 2.0},  {"barrier_height", 0.85},
            {"barrier_width", 2.5},    {"split_time", 50.0},      {"pointer_shift", 12.0}, {"shift_rate", 2.0},
            {"env_qubits", 16},        {"coupling_angle", std::numbers::pi / 2}, {"env_duration", 4.0},
            {"reversal", true},        {"reversal_time", 80.0},   {"wall_height", 5.0},    {"horizon", 156.0}};
  if (kind == "measurement-toy")
    return {{"cells", 1024},         {"extent", 128.0},       {"pointer_mass", 100.0}, {"dt", 0.01},
            {"pointer_width", 2.0},  {"pointer_shift", 24.0}, {"shift_rate", 2.0},     {"weight", 0.5},
            {"relative_phase", 0.0}, {"env_qubits", 20},      {"env_angle", std::numbers::pi / 4},
            {"env_steps", 100},      {"horizon", 12.0}};
  if (kind == "double-slit-photon")
    return {{"cells", 256},          {"extent", 256.0},         {"mass", 1.0},         {"photon_mass", 1.0},
            {"slit_separation", 14.0}, {"particle_width", 4.0}, {"photon_separation", 14.0},
            {"photon_width", 4.0},   {"dt", 0.05},              {"horizon", 60.0}};
  throw InvalidArgument("unknown scenario kind '" + kind + "'");
}

void require(bool ok, const std::string& constraint, const std::string& detail) {
  if (!ok) throw ResolvabilityError(constraint, detail);
}

void check_common(const ScenarioSpec& s) {
  require(s.number("dt") > 0.0, "positive_step", "dt must be positive");
  require(s.number("horizon") > 0.0, "positive_horizon", "horizon must be positive");
  require(s.number("sample_dt") >= s.number("dt"), "sample_interval", "sample_dt must be at least dt");
  require(s.number("epsilon_w") > 0.0 && s.number("epsilon_w") <= 1.0, "epsilon_range", "epsilon_w must lie in (0, 1]");
  require(s.number("theta") > 0.0 && s.number("theta") < 1.0, "theta_range", "theta must lie in (0, 1)");
  require(s.number("d_min") >= 0.0, "d_min_range", "d_min must be non-negative");
  require(s.number("mass_floor") >= 0.0 && s.number("mass_floor") < 1.0, "mass_floor_range",
          "mass_floor must lie in [0, 1)");
  require(s.integer("confirm") >= 1, "confirm_range", "confirm must be at least 1");
  require(s.integer("seed") >= 0, "seed_range", "seed must be non-negative");
}

void check_axis(const std::string& what, double center, double width, double extent, int cells) {
  require(cells >= 8, "grid_cells", fmt::format("{}: at least 8 cells per axis, got {}", what, cells));
  require(extent > 0.0, "grid_extent", what + ": extent must be positive");
  const double dx = extent / cells;
  require(width >= 4.0 * dx, "packet_width_cells",
          fmt::format("{}: width {} is {:.2f} cells, need at least 4", what, width, width / dx));
  const double margin = extent / 2.0 - std::abs(center);
  require(margin >= 6.0 * width, "boundary_margin",
          fmt::format("{}: packet at {} is {:.2f} widths from the boundary, need 6", what, center, margin / width));
}

double spread(double width, double mass, double t) {
  return width * std::sqrt(1.0 + std::pow(t / (mass * width * width), 2));
}

void check_barrier(const ScenarioSpec& s) {
  const int n = s.integer("cells");
  const double L = s.number("extent"), dx = L / n;
  const double x0 = s.number("packet_center"), sigma = s.number("packet_width"), k0 = s.number("packet_momentum");
  const double xb = s.number("barrier_center"), a = s.number("barrier_width"), v0 = s.number("barrier_height");
  require(s.number("mass") > 0.0, "positive_mass", "mass must be positive");
  check_axis("particle", x0, sigma, L, n);
  require(k0 > 0.0, "rightward_momentum", "the packet must move toward the barrier");
  require(k0 + 6.0 / sigma < std::numbers::pi / dx, "momentum_resolved", "packet momenta exceed the grid Nyquist limit");
  require(v0 >= 0.0, "barrier_height_range", "barrier height must be non-negative");
  require(std::abs(xb) + a / 2.0 < L / 2.0, "barrier_inside_grid", "barrier must lie inside the grid");
  require(v0 == 0.0 || a >= dx, "barrier_width_cells", "barrier must cover at least one cell");
  require(x0 + 4.0 * sigma <= xb - a / 2.0, "packet_left_of_barrier", "packet must start at least 4 widths left of the barrier");
}

void check_beam_splitter(const ScenarioSpec& s) {
  const int nx = s.integer("cells_x"), ny = s.integer("cells_y");
  const double Lx = s.number("extent_x"), Ly = s.number("extent_y");
  const double sx = s.number("packet_width"), sy = s.number("pointer_width");
  require(s.number("mass") > 0.0 && s.number("pointer_mass") > 0.0, "positive_mass", "masses must be positive");
  check_axis("particle", s.number("packet_center"), sx, Lx, nx);
  check_axis("pointer", 0.0, sy, Ly, ny);
  require(s.number("packet_momentum") > 0.0, "rightward_momentum", "the packet must move toward the beam splitter");
  require(s.number("packet_center") + 4.0 * sx <= -s.number("barrier_width") / 2.0, "packet_left_of_barrier",
          "packet must start at least 4 widths left of the beam splitter");
  require(s.number("barrier_width") >= Lx / nx, "barrier_width_cells", "beam splitter must cover at least one cell");
  require(s.number("pointer_shift") >= 0.0 && s.number("pointer_shift") + 6.0 * sy <= Ly / 2.0, "pointer_range",
          "displaced pointer packets must stay 6 widths inside the grid");
  require(s.number("pointer_shift") == 0.0 || s.number("shift_rate") > 0.0, "shift_rate", "shift rate must be positive");
  require(s.integer("env_qubits") >= 0 && s.integer("env_qubits") <= 60, "env_register_size",
          "environment register must have 0..60 qubits");
  require(s.number("split_time") > 0.0 && s.number("env_duration") >= 0.0 && s.number("reversal_time") > 0.0,
          "phase_durations", "phase durations must be positive");
  const double iwe = s.number("split_time") + s.number("pointer_shift") / std::max(s.number("shift_rate"), 1e-300);
  require(s.number("horizon") >= iwe, "horizon_covers_amplification",
          fmt::format("horizon must reach the end of amplification at t = {}", iwe));
}

void check_measurement(const ScenarioSpec& s) {
  const int n = s.integer("cells");
  const double L = s.number("extent"), sigma = s.number("pointer_width"), shift = s.number("pointer_shift");
  require(s.number("pointer_mass") > 0.0, "positive_mass", "pointer mass must be positive");
  check_axis("pointer", 0.0, sigma, L, n);
  require(shift > 0.0 && shift + 6.0 * sigma <= L / 2.0, "pointer_range",
          "displaced pointer packets must stay 6 widths inside the grid");
  require(s.number("shift_rate") > 0.0, "shift_rate", "shift rate must be positive");
  require(s.number("weight") > 0.0 && s.number("weight") < 1.0, "weight_range", "weight must lie in (0, 1)");
  require(s.integer("env_qubits") >= 1 && s.integer("env_qubits") <= 22, "env_register_size",
          "environment register must have 1..22 qubits");
  require(s.integer("env_steps") >= 1, "env_steps", "at least one environment step");
  require(s.number("horizon") >= shift / s.number("shift_rate") - 1e-9, "horizon_covers_measurement",
          "horizon must cover the pointer displacement");
}

void check_double_slit(const ScenarioSpec& s) {
  const int n = s.integer("cells");
  const double L = s.number("extent"), T = s.number("horizon");
  const double m = s.number("mass"), mp = s.number("photon_mass");
  require(m > 0.0 && mp > 0.0, "positive_mass", "masses must be positive");
  const double sp = s.number("particle_width"), sg = s.number("photon_width");
  const double d = s.number("slit_separation") / 2.0, D = s.number("photon_separation") / 2.0;
  check_axis("particle", d, sp, L, n);
  check_axis("photon", D, sg, L, n);
  require(d > 0.0 && D > 0.0, "separations", "slit and photon separations must be positive");
  require(d + 4.0 * spread(sp, m, T) <= L / 2.0, "spreading_exits_grid",
          fmt::format("particle packets reach the boundary before t = {}", T));
  require(D + 4.0 * spread(sg, mp, T) <= L / 2.0, "spreading_exits_grid",
          fmt::format("photon packets reach the boundary before t = {}", T));
}

bool same_type(const json& def, const json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  return false;
}

}  // namespace

nlohmann::json ScenarioSpec::to_json() const {
  json j = params;
  j["kind"] = kind;
  return j;
}

double ScenarioSpec::number(const std::string& key) const { return params.at(key).get<double>(); }
int ScenarioSpec::integer(const std::string& key) const { return params.at(key).get<int>(); }
bool ScenarioSpec::flag(const std::string& key) const { return params.at(key).get<bool>(); }

std::vector<std::string> scenario_kinds() {
  return {"barrier-scattering", "beam-splitter", "measurement-toy", "double-slit-photon"};
}

nlohmann::json scenario_defaults(const std::string& kind) {
  json d = common_defaults();
  d.update(kind_defaults(kind));
  return d;
}

ScenarioSpec resolve_spec(const nlohmann::json& config) {
  if (!config.is_object()) throw InvalidArgument("scenario config must be a JSON object");
  if (!config.contains("kind") || !config["kind"].is_string())
    throw InvalidArgument("scenario config needs a string 'kind'");
  ScenarioSpec spec;
  spec.kind = config["kind"].get<std::string>();
  spec.params = scenario_defaults(spec.kind);
  for (const auto& [key, value] : config.items()) {
    if (key == "kind") continue;
    if (!spec.params.contains(key)) throw InvalidArgument("unknown parameter '" + key + "' for " + spec.kind);
    if (!same_type(spec.params[key], value))
      throw InvalidArgument(fmt::format("parameter '{}' must be {}, got {}", key, spec.params[key].type_name(),
                                        value.dump()));
    spec.params[key] = value;
  }
  check_common(spec);
  if (spec.kind == "barrier-scattering") check_barrier(spec);
  else if (spec.kind == "beam-splitter") check_beam_splitter(spec);
  else if (spec.kind == "measurement-toy") check_measurement(spec);
  else check_double_slit(spec);
  return spec;
}

}  // namespace psd
