#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "psd/decomposition/decomposition.hpp"

namespace psd {

enum class WMode { exact_pair, brute_force, heuristic_upper_bound };

std::string to_string(WMode mode);

struct WOptions {
  int budget = 200;  // local-search sweeps
  bool allow_brute_force = true;
  /// Run the local search even where a closed form or enumeration applies.
  bool force_local_search = false;
  std::uint64_t seed = 0;  // visit order of the local search
  Tolerances tolerances;
};

/// w(𝒟) together with the partition that attains it. Labels may leave a block
/// empty (E(∅) = 0), which is where the infimum sits for some decompositions.
struct WReport {
  double value = 0.0;
  Partition partition;
  WMode mode = WMode::heuristic_upper_bound;
  std::uint32_t subset_argmax = 0;  // bit i set ⇔ component i ∈ I
  WOptions options;
};

struct SubsetScore {
  double value = 0.0;
  std::uint32_t argmax = 0;
};

/// max over proper non-empty I of ‖Ψ_I − E(Δ_I)Ψ‖ / ‖Ψ_I‖, with Ψ = Σ Ψᵢ.
/// Ties resolve to the numerically smallest mask.
SubsetScore w_given_partition(const Decomposition& d, const Partition& part);

/// Same ratio restricted to singleton subsets. Diagnostic only.
SubsetScore w_singletons_given_partition(const Decomposition& d, const Partition& part);

/// (∫ min{|Ψ₁|², |Ψ₂|²})^{1/2} / min{‖Ψ₁‖, ‖Ψ₂‖} with the argmax partition.
WReport w_exact_pair(const Decomposition& d);

/// Pointwise argmax |Ψᵢ(x)|², ties to the lower index.
Partition argmax_partition(const Decomposition& d);

/// inf over partitions. n = 2 uses the closed form, tiny grids enumerate,
/// otherwise a seeded local search gives an upper bound.
WReport w_optimize(const Decomposition& d, const WOptions& options = {});

nlohmann::json to_json(const WReport& report);

}  // namespace psd
