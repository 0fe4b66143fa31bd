#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/core/dynamics.hpp"
#include "psd/decomposition/finer.hpp"
#include "psd/decomposition/overlap.hpp"
#include "psd/tree/channels.hpp"

namespace psd {

struct ChannelSnapshot {
  double time = 0.0;
  Decomposition decomposition;
  Partition partition;
  double w_value = 0.0;  // worst w of the co-evolved snapshot over its confirmation window
};

struct TreeEdge {
  std::size_t from = 0;  // earlier snapshot
  std::size_t to = 0;    // later snapshot
  std::vector<int> h;    // component of `to` ↦ component of `from`
  double residual = 0.0;
};

struct TreeSample {
  double time = 0.0;
  int committed = 1;  // components of the current tree node
  int detected = 1;   // channels seen by the detector
  double w = 0.0;     // w of the latest snapshot evolved to this time
};

struct TreeOptions {
  double horizon = 10.0;
  double sample_dt = 1.0;
  ChannelOptions channels;
  double epsilon_w = 0.05;
  int confirm = 3;           // consecutive samples a candidate must survive
  double finer_tol = 0.05;   // group-sum tolerance for refinement maps
  WOptions w;
};

/// Called at every sample with U(t)ψ₀ and the latest snapshot evolved to t.
using TreeObserver =
    std::function<void(double t, const WaveFunction& psi, const std::vector<WaveFunction>& tracked)>;

/// Time-ordered snapshots 𝒟_t linked by refinement maps.
struct TreeStructure {
  std::vector<ChannelSnapshot> snapshots;
  std::vector<TreeEdge> edges;
  std::vector<double> branch_events;
  std::vector<TreeSample> series;
  TreeOptions options;
  double horizon = 0.0;  // effective horizon
};

/// Follows U(t)ψ₀ and commits a new snapshot when the detector reports more
/// channels than the current node has, the count holds for `confirm` samples,
/// the co-evolved candidate keeps w ≤ ε over that window, and the candidate
/// refines the evolved previous snapshot.
TreeStructure build_tree(const WaveFunction& psi0, const Dynamics& dyn, const TreeOptions& options,
                         const TreeObserver& observer = {});

struct ConditionCheck {
  bool passed = false;
  double worst = 0.0;
  std::string detail;
};

struct TreeVerdict {
  ConditionCheck sum;         // Σ𝒟₀ = Ψ₀
  ConditionCheck refinement;  // 𝒟_{t₂} ≼ U(t₂ − t₁)𝒟_{t₁}
  ConditionCheck overlap;     // w(𝒟_t) ≈ 0
  bool passed() const noexcept { return sum.passed && refinement.passed && overlap.passed; }
};

/// Re-checks the three tree conditions by re-evolution and re-scoring.
TreeVerdict verify_tree(const TreeStructure& tree, const WaveFunction& psi0, const Dynamics& dyn, double epsilon_w);

nlohmann::json to_json(const TreeStructure& tree);
nlohmann::json to_json(const TreeVerdict& verdict);
/// t, committed, detected, w
std::string tree_csv(const TreeStructure& tree);

}  // namespace psd
