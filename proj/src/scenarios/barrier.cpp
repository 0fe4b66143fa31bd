#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"

namespace psd {

ScenarioResult run_barrier_scattering(const ScenarioSpec& spec) {
  const Grid g = Grid::line(spec.integer("cells"), spec.number("extent"));
  const double mass = spec.number("mass");
  const double xb = spec.number("barrier_center"), a = spec.number("barrier_width"), v0 = spec.number("barrier_height");
  const double k0 = spec.number("packet_momentum"), sigma = spec.number("packet_width");
  const double eps = spec.number("epsilon_w");

  EvolutionEngine engine = EvolutionEngine::free(g, mass, spec.number("dt"));
  for (std::size_t c = 0; c < g.size(); ++c)
    if (std::abs(g.center(0, c) - xb) < a / 2.0) engine.potential[c] = v0;
  const StaticDynamics dyn(engine);
  const WaveFunction psi0 = gaussian_packet(g, spec.number("packet_center"), k0, sigma);

  struct Sample {
    double T, R, drift, w_rt;
  };
  std::vector<Sample> samples;
  auto observe = [&](double t, const WaveFunction& psi, const std::vector<WaveFunction>&) {
    const double edge = detail::edge_mass(psi, 0);
    if (edge > 1e-6)
      throw NumericalAbort(fmt::format("boundary_contact: {:.3e} of the norm sits at the grid edge at t = {}", edge, t));
    double T = 0.0, R = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) (g.center(0, c) >= xb ? T : R) += psi.cell_density(c);
    T *= g.cell_volume();
    R *= g.cell_volume();
    // reflected and transmitted packets by direction of motion
    const auto right = momentum_filter(psi, 0, [](double k) { return k > 0.0; });
    const auto left = momentum_filter(psi, 0, [](double k) { return k <= 0.0; });
    const double w_rt = detail::pair_w(left.density(), right.density(), g.cell_volume());
    samples.push_back({T, R, std::abs(psi.norm_squared() - 1.0), w_rt});
  };

  const TreeOptions opt = detail::tree_options(spec, spec.number("horizon"));
  TreeStructure tree = build_tree(psi0, dyn, opt, observe);
  const TreeVerdict tv = verify_tree(tree, psi0, dyn, eps);

  ScenarioResult r;
  r.kind = spec.kind;
  r.spec = spec;
  r.columns = {"t", "channels", "committed", "w", "w_plus", "T", "R", "w_reflected_transmitted"};
  double w_plus = 0.0, drift = 0.0, sum_err = 0.0;
  for (std::size_t k = 0; k < tree.series.size(); ++k) {
    const auto& s = tree.series[k];
    w_plus = std::max(w_plus, s.w);
    drift = std::max(drift, samples[k].drift);
    sum_err = std::max(sum_err, std::abs(samples[k].T + samples[k].R - 1.0));
    r.rows.push_back({s.time, static_cast<double>(s.detected), static_cast<double>(s.committed), s.w, w_plus,
                      samples[k].T, samples[k].R, samples[k].w_rt});
  }

  const double T = samples.back().T, R = samples.back().R;
  const double oracle = packet_transmission(k0, sigma, v0, a, mass);
  // the weaker packet must carry the mass floor and, both packets having about the
  // same width, clear the detector threshold relative to the stronger one
  const double weak = std::min(oracle, 1.0 - oracle), strong = std::max(oracle, 1.0 - oracle);
  const bool visible = weak >= spec.number("mass_floor") && weak >= spec.number("theta") * strong;
  const std::size_t expected = (v0 == 0.0 || !visible) ? 0 : 1;

  r.observables = {{"T", T},
                   {"R", R},
                   {"T_oracle", oracle},
                   {"T_relative_error", oracle > 0 ? std::abs(T - oracle) / oracle : 0.0},
                   {"branch_events", tree.branch_events},
                   {"expected_branches", expected},
                   {"w_plus", w_plus},
                   {"norm_drift", drift}};

  r.verdicts.push_back(detail::at_most("norm_conserved", drift, 1e-8));
  r.verdicts.push_back(detail::at_most("T_plus_R", sum_err, 1e-6));
  if (oracle > 0.0)
    r.verdicts.push_back(detail::at_most("T_vs_oracle", std::abs(T - oracle) / oracle, 0.1,
                                         fmt::format("T = {:.6f}, oracle {:.6f}", T, oracle)));
  r.verdicts.push_back({"branch_events", tree.branch_events.size() == expected,
                        static_cast<double>(tree.branch_events.size()), static_cast<double>(expected),
                        fmt::format("{} branch events, expected {}", tree.branch_events.size(), expected)});
  r.verdicts.push_back({"tree_verified", tv.passed(), tv.overlap.worst, eps,
                        fmt::format("sum: {}; refinement: {}; overlap: {}", tv.sum.detail, tv.refinement.detail,
                                    tv.overlap.detail)});
  if (!tree.branch_events.empty()) {
    // w of {reflected, transmitted} from the first commit on; rises below the
    // floor come from the slow residue left at the barrier and are ignored
    const double floor = 1e-5;
    const double t0 = tree.branch_events.front();
    double at_commit = -1.0, worst_rise = 0.0, prev = -1.0;
    for (std::size_t k = 0; k < tree.series.size(); ++k) {
      if (tree.series[k].time + 1e-9 < t0) continue;
      const double w = samples[k].w_rt;
      if (at_commit < 0) at_commit = w;
      if (prev >= 0 && w > floor) worst_rise = std::max(worst_rise, w - prev);
      prev = w;
    }
    r.observables["w_rt_at_commit"] = at_commit;
    r.observables["w_rt_at_horizon"] = samples.back().w_rt;
    r.observables["w_at_horizon"] = tree.series.back().w;
    r.verdicts.push_back(detail::at_most("w_decreasing_after_crossing", worst_rise, 0.0,
                                         fmt::format("largest rise between samples {:.3e}", worst_rise)));
    r.verdicts.push_back(detail::at_most("w_at_horizon", tree.series.back().w, eps));
  }
  r.tree = std::move(tree);
  r.tree_verdict = tv;
  return r;
}

}  // namespace psd
