#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "common.hpp"
#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"

namespace psd {
namespace {

WaveFunction masked(const WaveFunction& psi, const std::function<bool(std::size_t)>& keep) {
  WaveFunction out = psi;
  for (std::size_t c = 0; c < psi.cells(); ++c)
    if (!keep(c)) out(c) = 0.0;
  return out;
}

// Environment register of K qubits, each rotated about x by +φ/2 (pointer up)
// or −φ/2 (pointer down), read in the σ_y basis. A record with j "+y" outcomes
// has amplitude up(j) or down(j) and multiplicity C(K, j).
struct Register {
  int qubits = 0;
  std::vector<double> up, down, multiplicity;

  Register(int k, double phi) : qubits(k) {
    const double u = (std::cos(phi / 2) - std::sin(phi / 2)) / std::sqrt(2.0);
    const double v = (std::cos(phi / 2) + std::sin(phi / 2)) / std::sqrt(2.0);
    for (int j = 0; j <= k; ++j) {
      up.push_back(std::pow(u, j) * std::pow(v, k - j));
      down.push_back(std::pow(v, j) * std::pow(u, k - j));
      multiplicity.push_back(std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0)));
    }
  }
  std::size_t records() const { return up.size(); }
};

// Density over (cell, record) of a branch whose pointer-up and pointer-down parts are `hi` and `lo`.
std::vector<double> joint_density(const WaveFunction& hi, const WaveFunction& lo, const Register& reg) {
  std::vector<double> out(hi.cells() * reg.records());
  for (std::size_t c = 0; c < hi.cells(); ++c)
    for (std::size_t j = 0; j < reg.records(); ++j)
      out[c * reg.records() + j] = reg.multiplicity[j] * std::norm(hi(c) * reg.up[j] + lo(c) * reg.down[j]);
  return out;
}

}  // namespace

ScenarioResult run_beam_splitter(const ScenarioSpec& spec) {
  const Grid g = Grid::plane({static_cast<std::size_t>(spec.integer("cells_x")), static_cast<std::size_t>(spec.integer("cells_y"))},
                             {spec.number("extent_x"), spec.number("extent_y")});
  const std::array<double, 2> mass{spec.number("mass"), spec.number("pointer_mass")};
  const double dt = spec.number("dt"), eps = spec.number("epsilon_w");
  const double k0 = spec.number("packet_momentum");
  const double shift = spec.number("pointer_shift"), rate = spec.number("shift_rate");
  const int K = spec.integer("env_qubits");
  const double angle = spec.number("coupling_angle"), tau_e = spec.number("env_duration");
  const double horizon = spec.number("horizon");

  // phase 1: split on the barrier; phase 2: pointer drifts by ±shift with the particle's side
  const double t1 = spec.number("split_time");
  const double t2 = shift > 0.0 ? t1 + shift / rate : t1;
  const double t3 = t2 + tau_e;
  const double t_star = spec.number("reversal_time");

  EvolutionEngine splitter = EvolutionEngine::free(g, mass, dt);
  for (std::size_t c = 0; c < g.size(); ++c)
    if (std::abs(g.position(c)[0]) < spec.number("barrier_width") / 2.0) splitter.potential[c] = spec.number("barrier_height");
  const EvolutionEngine free = EvolutionEngine::free(g, mass, dt);

  std::vector<Stage> stages{{0.0, splitter, std::nullopt}};
  if (shift > 0.0) {
    std::vector<double> sign(g.cells(0));
    // smoothed sign: a hard step in the drift would kick momenta past the walls
    const double ramp = 4.0 * g.spacing(0);
    for (std::size_t i = 0; i < sign.size(); ++i) sign[i] = std::tanh(g.center(0, i) / ramp);
    stages.push_back({t1, free, Stage::Drift{1, [sign, rate](std::size_t line, std::size_t) { return rate * sign[line]; }}});
  } else {
    stages.push_back({t1, free, std::nullopt});
  }
  const StagedDynamics pre(stages);

  const WaveFunction psi0 = gaussian_packet(g, {spec.number("packet_center"), 0.0}, {k0, 0.0},
                                            {spec.number("packet_width"), spec.number("pointer_width")});

  auto check_edges = [](const WaveFunction& psi, double t) {
    const double edge = std::max(detail::edge_mass(psi, 0), detail::edge_mass(psi, 1));
    if (edge > 1e-6)
      throw NumericalAbort(fmt::format("boundary_contact: {:.3e} of the norm sits at the grid edge at t = {}", edge, t));
  };

  // mean pointer position on the x >= 0 side minus the x < 0 side
  const auto separation = [&g](const WaveFunction& psi) {
    double m[2] = {0, 0}, y[2] = {0, 0};
    for (std::size_t c = 0; c < g.size(); ++c) {
      const auto p = g.position(c);
      const int side = p[0] >= 0.0;
      m[side] += psi.cell_density(c);
      y[side] += psi.cell_density(c) * p[1];
    }
    return (m[1] > 0 ? y[1] / m[1] : 0.0) - (m[0] > 0 ? y[0] / m[0] : 0.0);
  };

  double drift = 0.0;
  std::vector<double> pointer_gap;
  std::vector<WaveFunction> at_t2;
  auto observe = [&](double t, const WaveFunction& psi, const std::vector<WaveFunction>& tracked) {
    check_edges(psi, t);
    drift = std::max(drift, std::abs(psi.norm_squared() - 1.0));
    pointer_gap.push_back(separation(psi));
    at_t2 = tracked;
  };
  TreeStructure tree = build_tree(psi0, pre, detail::tree_options(spec, t2), observe);
  const TreeVerdict tv = verify_tree(tree, psi0, pre, eps);
  const double t_tree = tree.horizon;

  // transmitted (A) and reflected (B) branches at the end of amplification
  const WaveFunction total = [&] {
    WaveFunction s = at_t2.front();
    for (std::size_t i = 1; i < at_t2.size(); ++i) s += at_t2[i];
    return s;
  }();
  WaveFunction A(g), B(g);
  if (at_t2.size() >= 2) {
    for (const auto& comp : at_t2) (mean_position(comp, 0) >= 0.0 ? A : B) += comp;
  } else {
    A = masked(total, [&](std::size_t c) { return g.position(c)[0] >= 0.0; });
    B = total - A;
  }

  // phase 3 onward: the four (branch, pointer sign) fields under the post-amplification Hamiltonian
  const bool reversal = spec.flag("reversal");
  const auto mean_x = [](const WaveFunction& f) { return f.norm_squared() > 0 ? mean_position(f, 0) : 0.0; };
  std::vector<Stage> post_stages{{0.0, free, std::nullopt}};
  auto up = [&](std::size_t c) { return g.position(c)[1] >= 0.0; };
  auto down = [&](std::size_t c) { return g.position(c)[1] < 0.0; };
  std::vector<WaveFunction> fields{masked(A, up), masked(A, down), masked(B, up), masked(B, down)};

  ScenarioResult r;
  r.kind = spec.kind;
  r.spec = spec;
  r.columns = {"t", "channels", "committed", "w", "w_plus", "env_overlap", "pointer_separation"};
  double w_plus = 0.0;
  for (std::size_t k = 0; k < tree.series.size(); ++k) {
    const auto& s = tree.series[k];
    w_plus = std::max(w_plus, s.w);
    r.rows.push_back({s.time, static_cast<double>(s.detected), static_cast<double>(s.committed), s.w, w_plus, 1.0,
                      pointer_gap[k]});
  }

  const double sample_dt = spec.number("sample_dt");
  const std::size_t per_sample = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_dt / dt)));
  double xs = 0.0, wall = 0.0, env = 1.0, w_after_iwe = 0.0, w_max_rejoin = 0.0, joint_drift = 0.0;
  std::size_t steps_done = 0;
  std::unique_ptr<StagedDynamics> post;
  const auto make_post = [&] {
    post = std::make_unique<StagedDynamics>(post_stages);
  };
  make_post();
  double t = t_tree;
  const int final_committed = tree.series.back().committed;
  while (t + 1e-9 < horizon) {
    // the reversing potential is fixed from the branch geometry at t3
    if (reversal && wall == 0.0 && t + 1e-9 >= t3) {
      xs = (mean_x(fields[0] + fields[1]) - mean_x(fields[2] + fields[3])) / 2.0;
      wall = (k0 * t_star + xs) / 2.0;
      const double omega = std::numbers::pi / (2.0 * t_star);
      EvolutionEngine trap = EvolutionEngine::free(g, mass, dt);
      for (std::size_t c = 0; c < g.size(); ++c) {
        const auto p = g.position(c);
        // smooth wall edges: a sharp step leaks through on the spectral grid
        trap.potential[c] = spec.number("wall_height") * 0.5 * (1.0 + std::tanh((std::abs(p[0]) - wall) / 2.0)) +
                            0.5 * mass[1] * omega * omega * p[1] * p[1];
      }
      post_stages = {{0.0, trap, std::nullopt}};
      make_post();
    }
    const std::size_t n = std::min<std::size_t>(per_sample, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((horizon - t) / dt))));
    post->advance(fields, t, n);
    steps_done += n;
    t = t_tree + static_cast<double>(steps_done) * dt;

    const double phi = angle * (tau_e > 0.0 ? std::clamp((t - t2) / tau_e, 0.0, 1.0) : 1.0);
    const Register reg(K, phi);
    env = K > 0 ? std::pow(std::abs(std::cos(phi)), K) : 1.0;
    const auto da = joint_density(fields[0], fields[1], reg);
    const auto db = joint_density(fields[2], fields[3], reg);
    const double w = detail::pair_w(da, db, g.cell_volume());
    WaveFunction sum_hi = fields[0] + fields[2], sum_lo = fields[1] + fields[3];
    double norm = 0.0;
    for (double d : joint_density(sum_hi, sum_lo, reg)) norm += d;
    joint_drift = std::max(joint_drift, std::abs(norm * g.cell_volume() - 1.0));
    check_edges(sum_hi + sum_lo, t);

    w_plus = std::max(w_plus, w);
    if (t + 1e-9 >= t3) w_after_iwe = std::max(w_after_iwe, w);
    if (wall > 0.0) w_max_rejoin = std::max(w_max_rejoin, w);
    r.rows.push_back({t, static_cast<double>(final_committed), static_cast<double>(final_committed), w, w_plus, env,
                      separation(sum_hi + sum_lo)});
  }

  r.observables = {{"branch_events", tree.branch_events},
                   {"T", A.norm_squared()},
                   {"t_split_end", t1},
                   {"t_amplification_end", t2},
                   {"t_environment_end", t3},
                   {"t_rejoin", reversal ? t3 + t_star : -1.0},
                   {"wall_position", wall},
                   {"env_overlap", env},
                   {"w_plus", w_plus},
                   {"w_after_environment", w_after_iwe},
                   {"w_during_reversal", w_max_rejoin},
                   {"norm_drift", std::max(drift, joint_drift)}};

  r.verdicts.push_back(detail::at_most("norm_conserved", std::max(drift, joint_drift), 1e-8));
  if (spec.number("barrier_height") > 0.0)
    r.verdicts.push_back({"single_branch", tree.branch_events.size() == 1 && final_committed == 2,
                          static_cast<double>(tree.branch_events.size()), 1.0,
                          fmt::format("{} branch events, {} final components", tree.branch_events.size(), final_committed)});
  r.verdicts.push_back({"tree_verified", tv.passed(), tv.overlap.worst, eps,
                        fmt::format("sum: {}; refinement: {}; overlap: {}", tv.sum.detail, tv.refinement.detail,
                                    tv.overlap.detail)});
  if (K > 0) {
    r.verdicts.push_back(detail::at_most("env_overlap", env, 1e-4));
    r.verdicts.push_back(detail::at_most("joint_w_to_horizon", w_plus, eps));
  } else if (reversal) {
    r.verdicts.push_back(detail::at_least("no_permanence_without_environment", w_max_rejoin, 0.5,
                                          fmt::format("w returns to {:.3f} after the pointer branches re-meet", w_max_rejoin)));
  }
  if (at_t2.size() < 2) r.notes.push_back("no branch at the end of amplification: branches taken as the x >= 0 and x < 0 halves");
  r.notes.push_back("environment qubits are conditioned on the pointer sign fixed at the end of amplification and read in the sigma_y basis");
  r.tree = std::move(tree);
  r.tree_verdict = tv;
  return r;
}

}  // namespace psd
