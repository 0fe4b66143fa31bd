#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"
#include "psd/decomposition/overlap.hpp"
#include "psd/oscillator/oscillator.hpp"

namespace psd {
namespace {

// ψ(x, s) = coef[s]·A(x)
WaveFunction with_qubit(const WaveFunction& pointer, Complex c0, Complex c1) {
  WaveFunction out(pointer.grid(), 2);
  for (std::size_t c = 0; c < pointer.cells(); ++c) {
    out(c, 0) = c0 * pointer(c);
    out(c, 1) = c1 * pointer(c);
  }
  return out;
}

// Keeps the part of ψ along the qubit state (v0, v1), re-expressed in the standard basis.
WaveFunction qubit_projection(const WaveFunction& psi, Complex v0, Complex v1) {
  WaveFunction out(psi.grid(), 2);
  for (std::size_t c = 0; c < psi.cells(); ++c) {
    const Complex a = std::conj(v0) * psi(c, 0) + std::conj(v1) * psi(c, 1);
    out(c, 0) = a * v0;
    out(c, 1) = a * v1;
  }
  return out;
}

// ρ_S(s, s') = ⟨ψ_s'|ψ_s⟩ over the pointer coordinate
std::array<Complex, 3> reduced_qubit(const WaveFunction& psi) {
  Complex r00 = 0.0, r11 = 0.0, r01 = 0.0;
  for (std::size_t c = 0; c < psi.cells(); ++c) {
    r00 += std::norm(psi(c, 0));
    r11 += std::norm(psi(c, 1));
    r01 += psi(c, 0) * std::conj(psi(c, 1));
  }
  const double dv = psi.grid().cell_volume();
  return {r00 * dv, r11 * dv, r01 * dv};
}

double purity(const std::array<Complex, 3>& r) {
  return std::norm(r[0]) + std::norm(r[1]) + 2.0 * std::norm(r[2]);
}

}  // namespace

ScenarioResult run_measurement_toy(const ScenarioSpec& spec) {
  const Grid g = Grid::line(spec.integer("cells"), spec.number("extent"));
  const double dt = spec.number("dt"), eps = spec.number("epsilon_w"), horizon = spec.number("horizon");
  const double sigma = spec.number("pointer_width"), L = spec.number("pointer_shift"), rate = spec.number("shift_rate");
  const double weight = spec.number("weight");
  const Complex c1 = std::sqrt(weight), c2 = std::polar(std::sqrt(1.0 - weight), spec.number("relative_phase"));

  // pointer moves to −L for |φ₁⟩ = |0⟩ and to +L for |φ₂⟩ = |1⟩
  const EvolutionEngine engine = EvolutionEngine::free(g, spec.number("pointer_mass"), dt);
  std::vector<Stage> stages{{0.0, engine, Stage::Drift{0, [rate](std::size_t, std::size_t s) { return s == 0 ? -rate : rate; }}}};
  const double t_measure = L / rate;
  if (horizon > t_measure + dt) stages.push_back({t_measure, engine, std::nullopt});
  const StagedDynamics dyn(stages);

  const WaveFunction ready = gaussian_packet(g, 0.0, 0.0, sigma);
  const WaveFunction psi0 = with_qubit(ready, c1, c2);

  double drift = 0.0;
  std::vector<double> separation;
  WaveFunction psi_end = psi0;
  auto observe = [&](double t, const WaveFunction& psi, const std::vector<WaveFunction>&) {
    const double edge = detail::edge_mass(psi, 0);
    if (edge > 1e-6)
      throw NumericalAbort(fmt::format("boundary_contact: {:.3e} of the norm sits at the grid edge at t = {}", edge, t));
    drift = std::max(drift, std::abs(psi.norm_squared() - 1.0));
    double m[2] = {0, 0}, x[2] = {0, 0};
    for (std::size_t c = 0; c < g.size(); ++c)
      for (std::size_t s = 0; s < 2; ++s) {
        m[s] += std::norm(psi(c, s));
        x[s] += std::norm(psi(c, s)) * g.center(0, c);
      }
    separation.push_back(x[1] / m[1] - x[0] / m[0]);
    psi_end = psi;
  };
  TreeStructure tree = build_tree(psi0, dyn, detail::tree_options(spec, horizon), observe);
  const TreeVerdict tv = verify_tree(tree, psi0, dyn, eps);
  const double t_end = tree.horizon;

  // the preferred decomposition and its rival
  const double r = 1.0 / std::sqrt(2.0);
  const Decomposition d = Decomposition::from_components(
      {qubit_projection(psi_end, 1.0, 0.0), qubit_projection(psi_end, 0.0, 1.0)});
  const Decomposition d_rival = Decomposition::from_components(
      {qubit_projection(psi_end, r, r), qubit_projection(psi_end, r, -r)});
  const double w_d = w_exact_pair(d).value, w_rival = w_exact_pair(d_rival).value;

  // stability: pointer states are recorded faithfully, superpositions get entangled
  const std::size_t steps = dyn.steps_for(t_end);
  const double moved = rate * std::min(static_cast<double>(steps) * dt, t_measure);
  WaveFunction spread = ready;
  engine.validate();
  {
    SplitStepPropagator prop(engine);
    prop.advance(spread, steps);
  }
  double faithful = 1.0;
  for (int s = 0; s < 2; ++s) {
    std::vector<WaveFunction> one{with_qubit(ready, s == 0 ? 1.0 : 0.0, s == 0 ? 0.0 : 1.0)};
    dyn.advance(one, 0.0, steps);
    WaveFunction target = spread;
    translate(target, 0, [&](std::size_t, std::size_t) { return s == 0 ? -moved : moved; });
    faithful = std::min(faithful, std::abs(inner(with_qubit(target, s == 0 ? 1.0 : 0.0, s == 0 ? 0.0 : 1.0), one[0])));
  }
  double mixed_purity = 0.0;
  for (double sign : {1.0, -1.0}) {
    std::vector<WaveFunction> one{with_qubit(ready, r, sign * r)};
    dyn.advance(one, 0.0, steps);
    mixed_purity = std::max(mixed_purity, purity(reduced_qubit(one[0])));
  }

  // pointer overlap ⟨A₂|A₁⟩ from the grid state
  const auto grid_rho = reduced_qubit(psi_end);
  const Complex pointer_overlap = grid_rho[2] / (c1 * std::conj(c2));

  ScenarioResult res;
  res.kind = spec.kind;
  res.spec = spec;
  res.columns = {"t", "channels", "committed", "w", "w_plus", "env_overlap", "pointer_separation"};
  double w_plus = 0.0;
  for (std::size_t k = 0; k < tree.series.size(); ++k) {
    const auto& s = tree.series[k];
    w_plus = std::max(w_plus, s.w);
    res.rows.push_back({s.time, static_cast<double>(s.detected), static_cast<double>(s.committed), s.w, w_plus, 1.0,
                        separation[k]});
  }

  // environment phase: the pointer is held still while K qubits record its position, one step per dt
  IdealModelConfig env;
  env.system_dim = 2;
  env.qubits = spec.integer("env_qubits");
  const int env_steps = spec.integer("env_steps");
  env.kappa_dt = spec.number("env_angle") / env_steps;
  double offdiag_error = 0.0, diag_error = 0.0, full_offdiag = 0.0, env_overlap = 1.0;
  const int env_rows = std::min(env_steps, 10);
  for (int k = 1; k <= env_rows; ++k) {
    const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(env_steps) * k / env_rows));
    const IdealModelState st = ideal_model_evolve(env, {c1, c2}, n);
    const double oracle = std::abs(c1 * c2) * std::pow(std::abs(std::cos(st.angle)), env.qubits);
    offdiag_error = std::max(offdiag_error, std::abs(std::abs(st.reduced(0, 1)) - oracle));
    diag_error = std::max({diag_error, std::abs(st.reduced(0, 0).real() - weight), std::abs(st.reduced(1, 1).real() - (1.0 - weight))});
    env_overlap = std::abs(st.env_overlap(0, 1));
    full_offdiag = std::abs(st.reduced(0, 1) * pointer_overlap);
    const auto& last = tree.series.back();
    res.rows.push_back({t_end + static_cast<double>(n) * dt, static_cast<double>(last.detected),
                        static_cast<double>(last.committed), last.w, w_plus, env_overlap, separation.back()});
  }

  res.observables = {{"w_preferred", w_d},
                     {"w_rival", w_rival},
                     {"pointer_overlap", std::abs(pointer_overlap)},
                     {"stability_overlap", faithful},
                     {"superposition_purity", mixed_purity},
                     {"env_overlap", env_overlap},
                     {"offdiag_error", offdiag_error},
                     {"diag_error", diag_error},
                     {"reduced_offdiag", full_offdiag},
                     {"branch_events", tree.branch_events},
                     {"norm_drift", drift}};
  res.verdicts.push_back(detail::at_most("norm_conserved", drift, 1e-8));
  res.verdicts.push_back(detail::at_most("w_preferred", w_d, eps));
  res.verdicts.push_back(detail::at_least("w_rival", w_rival, 0.5));
  res.verdicts.push_back(detail::at_least("pointer_states_stable", faithful, 0.99));
  res.verdicts.push_back(detail::at_most("superposition_entangles", mixed_purity, 0.99,
                                         fmt::format("reduced qubit purity {:.6f}", mixed_purity)));
  res.verdicts.push_back(detail::at_most("offdiag_matches_overlap_product", offdiag_error, 1e-6));
  res.verdicts.push_back(detail::at_most("diagonal_constant", diag_error, 1e-10));
  res.verdicts.push_back(detail::at_most("reduced_diagonal_in_pointer_basis", full_offdiag, 1e-6));
  res.verdicts.push_back({"tree_verified", tv.passed(), tv.overlap.worst, eps,
                          fmt::format("sum: {}; refinement: {}; overlap: {}", tv.sum.detail, tv.refinement.detail,
                                      tv.overlap.detail)});
  res.notes.push_back("the environment is a qubit register driven by the ideal decoherence model while the pointer is held still");
  res.tree = std::move(tree);
  res.tree_verdict = tv;
  return res;
}

}  // namespace psd
