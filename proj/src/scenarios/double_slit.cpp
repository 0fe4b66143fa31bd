#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"
#include "psd/tree/channels.hpp"

namespace psd {
namespace {

// max |P − P_incoh| / P_incoh over cells where P_incoh is at least 10% of its peak
double fringe_contrast(const std::vector<double>& p, const std::vector<double>& incoherent) {
  const double peak = *std::max_element(incoherent.begin(), incoherent.end());
  double c = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (incoherent[i] >= 0.1 * peak) c = std::max(c, std::abs(p[i] - incoherent[i]) / incoherent[i]);
  return c;
}

// ∫|ψ|² over the second axis
std::vector<double> marginal_x(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  std::vector<double> out(g.cells(0), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) out[g.unravel(c)[0]] += psi.cell_density(c);
  return out;
}

}  // namespace

ScenarioResult run_double_slit_photon(const ScenarioSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.integer("cells"));
  const double extent = spec.number("extent"), dt = spec.number("dt"), eps = spec.number("epsilon_w");
  const double m = spec.number("mass"), mp = spec.number("photon_mass");
  const double d = spec.number("slit_separation") / 2.0, D = spec.number("photon_separation") / 2.0;
  const double sp = spec.number("particle_width"), sg = spec.number("photon_width");

  // joint grid: particle along x, photon along y
  const Grid g = Grid::plane({n, n}, {extent, extent});
  const StaticDynamics joint(EvolutionEngine::free(g, {m, mp}, dt));
  const Grid line = Grid::line(n, extent);
  const StaticDynamics particle(EvolutionEngine::free(line, m, dt));
  const StaticDynamics photon(EvolutionEngine::free(line, mp, dt));

  // branch i: particle behind slit i, photon scattered to side i
  std::vector<WaveFunction> branches{gaussian_packet(g, {-d, -D}, {0.0, 0.0}, {sp, sg}),
                                     gaussian_packet(g, {d, D}, {0.0, 0.0}, {sp, sg})};
  const double norm0 = (branches[0] + branches[1]).norm_squared();
  for (auto& b : branches) b *= 1.0 / std::sqrt(norm0);
  std::vector<WaveFunction> gammas{gaussian_packet(line, -D, 0.0, sg), gaussian_packet(line, D, 0.0, sg)};
  std::vector<WaveFunction> phis{gaussian_packet(line, -d, 0.0, sp), gaussian_packet(line, d, 0.0, sp)};
  const double overlap0 = std::abs(inner(gammas[0], gammas[1]));

  ScenarioResult r;
  r.kind = spec.kind;
  r.spec = spec;
  r.columns = {"t", "channels", "w", "w_plus", "photon_overlap", "contrast", "control_contrast"};
  const ChannelOptions channel_opt{spec.number("theta"), spec.number("d_min"), spec.number("mass_floor")};
  const double horizon = spec.number("horizon");
  const std::size_t per_sample = std::max<std::size_t>(1, joint.steps_for(spec.number("sample_dt")));
  const std::size_t total_steps = joint.steps_for(horizon);

  double w0 = 0.0, w_plus = 0.0, overlap_drift = 0.0, norm_drift = 0.0, contrast_max = 0.0, control_end = 0.0;
  double t_max_w = 0.0;
  for (std::size_t done = 0;;) {
    const double t = static_cast<double>(done) * dt;
    const WaveFunction total = branches[0] + branches[1];
    const double edge = std::max(detail::edge_mass(total, 0), detail::edge_mass(total, 1));
    if (edge > 1e-6)
      throw NumericalAbort(fmt::format("boundary_contact: {:.3e} of the norm sits at the grid edge at t = {}", edge, t));
    norm_drift = std::max(norm_drift, std::abs(total.norm_squared() - 1.0));

    const double w = detail::pair_w(branches[0].density(), branches[1].density(), g.cell_volume());
    if (done == 0) w0 = w;
    if (w > w_plus) t_max_w = t;
    w_plus = std::max(w_plus, w);
    const double overlap = std::abs(inner(gammas[0], gammas[1]));
    overlap_drift = std::max(overlap_drift, std::abs(overlap - overlap0));

    auto incoherent = marginal_x(branches[0]);
    const auto second = marginal_x(branches[1]);
    for (std::size_t i = 0; i < incoherent.size(); ++i) incoherent[i] += second[i];
    const double contrast = fringe_contrast(marginal_x(total), incoherent);
    contrast_max = std::max(contrast_max, contrast);

    const auto d1 = phis[0].density(), d2 = phis[1].density(), d12 = (phis[0] + phis[1]).density();
    std::vector<double> ctrl_incoherent(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) ctrl_incoherent[i] = d1[i] + d2[i];
    control_end = fringe_contrast(d12, ctrl_incoherent);

    const int channels = detect_channels(total, channel_opt).blocks();
    r.rows.push_back({t, static_cast<double>(channels), w, w_plus, overlap, contrast, control_end});

    if (done >= total_steps) break;
    const std::size_t k = std::min(per_sample, total_steps - done);
    joint.advance(branches, t, k);
    photon.advance(gammas, t, k);
    particle.advance(phis, t, k);
    done += k;
  }

  r.observables = {{"w_initial", w0},
                   {"w_max", w_plus},
                   {"t_w_max", t_max_w},
                   {"photon_overlap", overlap0},
                   {"photon_overlap_drift", overlap_drift},
                   {"contrast_max", contrast_max},
                   {"control_contrast", control_end},
                   {"norm_drift", norm_drift}};
  r.verdicts.push_back(detail::at_most("norm_conserved", norm_drift, 1e-8));
  r.verdicts.push_back(detail::at_most("photon_overlap_constant", overlap_drift, 1e-8));
  r.verdicts.push_back(detail::at_most("w_initial", w0, eps));
  r.verdicts.push_back(detail::at_least("w_reoverlap", w_plus, 0.5));
  r.verdicts.push_back(detail::at_most("contrast_with_photon", contrast_max, 0.1));
  r.verdicts.push_back(detail::at_least("control_contrast", control_end, 0.8));
  return r;
}

}  // namespace psd
