#include "psd/tree/tree.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

#include "psd/core/errors.hpp"
#include "psd/core/serialize.hpp"
#include "psd/tree/permanence.hpp"

namespace psd {
namespace {

struct Candidate {
  std::size_t start = 0;
  Decomposition at_start;
  Partition partition;
  std::vector<WaveFunction> evolved;
  FinerResult link;
  int seen = 1;
  double worst_w = 0.0;
};

std::size_t steps_between(const Dynamics& dyn, double t1, double t2) {
  return static_cast<std::size_t>(std::llround((t2 - t1) / dyn.dt()));
}

}  // namespace

TreeStructure build_tree(const WaveFunction& psi0, const Dynamics& dyn, const TreeOptions& opt,
                         const TreeObserver& observer) {
  if (std::abs(psi0.norm() - 1.0) > 1e-6) throw InvalidArgument("initial state must be normalized");
  if (!(psi0.grid() == dyn.grid())) throw GridMismatch("initial state and dynamics live on different grids");
  if (opt.confirm < 1) throw InvalidArgument("confirmation window must be at least one sample");
  const SampleClock clock(dyn, opt.horizon, opt.sample_dt);

  TreeStructure tree;
  tree.options = opt;
  tree.horizon = clock.horizon();
  tree.snapshots.push_back(
      ChannelSnapshot{0.0, Decomposition::from_components({psi0}), Partition::single(psi0.grid()), 0.0});

  std::vector<WaveFunction> psi{psi0};
  std::vector<WaveFunction> tracked{psi0};
  std::optional<Candidate> cand;

  for (std::size_t k = 0; k < clock.samples; ++k) {
    const double t = clock.time(k);
    if (k > 0) {
      const double t0 = clock.time(k - 1);
      dyn.advance(psi, t0, clock.steps_per_sample);
      dyn.advance(tracked, t0, clock.steps_per_sample);
      if (cand) dyn.advance(cand->evolved, t0, clock.steps_per_sample);
    }
    const Partition detected = detect_channels(psi[0], opt.channels);
    const int committed = static_cast<int>(tree.snapshots.back().decomposition.size());

    if (cand && k > cand->start) {
      const double wc = w_optimize(Decomposition::from_components(cand->evolved), opt.w).value;
      if (detected.blocks() != cand->partition.blocks() || wc > opt.epsilon_w) {
        cand.reset();
      } else {
        cand->worst_w = std::max(cand->worst_w, wc);
        ++cand->seen;
      }
    }
    if (cand && cand->seen >= opt.confirm) {
      const std::size_t from = tree.snapshots.size() - 1;
      tree.snapshots.push_back(
          ChannelSnapshot{clock.time(cand->start), cand->at_start, cand->partition, cand->worst_w});
      tree.edges.push_back(TreeEdge{from, from + 1, cand->link.h, cand->link.residual});
      tree.branch_events.push_back(clock.time(cand->start));
      tracked = std::move(cand->evolved);
      cand.reset();
    } else if (!cand && detected.blocks() > committed) {
      Decomposition d = decompose_by_partition(psi[0], detected);
      FinerResult link = is_finer(d, Decomposition::from_components(tracked), opt.finer_tol);
      if (link.found()) {
        cand = Candidate{k, d, detected, d.components(), std::move(link), 1, 0.0};
        if (opt.confirm == 1) {
          const std::size_t from = tree.snapshots.size() - 1;
          tree.snapshots.push_back(ChannelSnapshot{t, d, detected, 0.0});
          tree.edges.push_back(TreeEdge{from, from + 1, cand->link.h, cand->link.residual});
          tree.branch_events.push_back(t);
          tracked = std::move(cand->evolved);
          cand.reset();
        }
      }
    }

    TreeSample s;
    s.time = t;
    s.committed = static_cast<int>(tree.snapshots.back().decomposition.size());
    s.detected = detected.blocks();
    s.w = w_optimize(Decomposition::from_components(tracked), opt.w).value;
    tree.series.push_back(s);
    if (observer) observer(t, psi[0], tracked);
  }
  return tree;
}

TreeVerdict verify_tree(const TreeStructure& tree, const WaveFunction& psi0, const Dynamics& dyn, double eps) {
  TreeVerdict v;
  if (tree.snapshots.empty()) {
    v.sum.detail = v.refinement.detail = v.overlap.detail = "empty tree";
    return v;
  }
  const auto& snaps = tree.snapshots;

  // (1) the root sums to the initial state
  const double n0 = psi0.norm();
  v.sum.worst = (snaps.front().decomposition.component_sum() - psi0).norm() / (n0 > 0 ? n0 : 1.0);
  v.sum.passed = snaps.front().time == 0.0 && v.sum.worst <= 1e-8;
  v.sum.detail = fmt::format("relative residual {:.3e} at t = {}", v.sum.worst, snaps.front().time);

  // (2) refinement for consecutive pairs plus one non-adjacent spot check
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 1; k < snaps.size(); ++k) pairs.emplace_back(k - 1, k);
  if (snaps.size() >= 3) pairs.emplace_back(0, snaps.size() - 1);
  v.refinement.passed = true;
  for (const auto& [a, b] : pairs) {
    std::vector<WaveFunction> evolved = snaps[a].decomposition.components();
    dyn.advance(evolved, snaps[a].time, steps_between(dyn, snaps[a].time, snaps[b].time));
    const FinerResult f = is_finer(snaps[b].decomposition, Decomposition::from_components(evolved), eps);
    if (!f.found()) {
      v.refinement.passed = false;
      v.refinement.worst = std::max(v.refinement.worst, f.residual);
      v.refinement.detail += fmt::format("{}→{}: {}; ", a, b, f.reason);
      continue;
    }
    v.refinement.worst = std::max(v.refinement.worst, f.residual);
  }
  if (v.refinement.detail.empty())
    v.refinement.detail = fmt::format("{} pairs, worst residual {:.3e}", pairs.size(), v.refinement.worst);

  // (3) w along each branch segment on the sample clock
  const SampleClock clock(dyn, tree.horizon > 0 ? tree.horizon : dyn.dt(), tree.options.sample_dt);
  double worst_t = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const double end = k + 1 < snaps.size() ? snaps[k + 1].time : clock.horizon();
    std::vector<WaveFunction> comps = snaps[k].decomposition.components();
    double t = snaps[k].time;
    while (true) {
      const double w = w_optimize(Decomposition::from_components(comps), tree.options.w).value;
      if (w > v.overlap.worst) {
        v.overlap.worst = w;
        worst_t = t;
      }
      const double next = t + static_cast<double>(clock.steps_per_sample) * clock.dt;
      if (next > end + 1e-9 * clock.dt || (k + 1 < snaps.size() && next >= end - 1e-9 * clock.dt)) break;
      dyn.advance(comps, t, clock.steps_per_sample);
      t = next;
    }
  }
  v.overlap.passed = v.overlap.worst <= eps;
  v.overlap.detail = fmt::format("worst w {:.3e} at t = {}", v.overlap.worst, worst_t);
  return v;
}

nlohmann::json to_json(const TreeStructure& tree) {
  nlohmann::json j;
  j["horizon"] = tree.horizon;
  j["nodes"] = nlohmann::json::array();
  for (const auto& s : tree.snapshots) {
    std::vector<double> norms;
    for (const auto& c : s.decomposition.components()) norms.push_back(c.norm_squared());
    j["nodes"].push_back({{"time", s.time},
                          {"components", s.decomposition.size()},
                          {"norms2", norms},
                          {"w_value", s.w_value},
                          {"partition_rle", rle_labels(s.partition.labels())}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : tree.edges)
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"h", e.h}, {"residual", e.residual}});
  j["branch_events"] = tree.branch_events;
  const auto& o = tree.options;
  j["options"] = {{"horizon", o.horizon},
                  {"sample_dt", o.sample_dt},
                  {"theta", o.channels.theta},
                  {"d_min", o.channels.d_min},
                  {"mass_floor", o.channels.mass_floor},
                  {"epsilon_w", o.epsilon_w},
                  {"confirm", o.confirm},
                  {"finer_tol", o.finer_tol}};
  return j;
}

nlohmann::json to_json(const TreeVerdict& v) {
  auto cond = [](const ConditionCheck& c) {
    return nlohmann::json{{"passed", c.passed}, {"worst", c.worst}, {"detail", c.detail}};
  };
  return {{"sum", cond(v.sum)},
          {"refinement", cond(v.refinement)},
          {"overlap", cond(v.overlap)},
          {"passed", v.passed()}};
}

std::string tree_csv(const TreeStructure& tree) {
  std::string out = "t,committed,detected,w\n";
  for (const auto& s : tree.series) out += fmt::format("{},{},{},{:.12e}\n", s.time, s.committed, s.detected, s.w);
  return out;
}

}  // namespace psd
