#pragma once

#include <string>
#include <vector>

#include "psd/decomposition/decomposition.hpp"

namespace psd {

enum class FinerStatus { found, absent, inconclusive };

std::string to_string(FinerStatus status);

/// Outcome of a 𝒟′ ≼ 𝒟 test. When found, `h[j]` is the index in 𝒟 that
/// component j of 𝒟′ maps to, and `residual` is the worst relative group-sum
/// error max_i ‖Ψᵢ − Σ_{h(j)=i} Ψ′ⱼ‖ / ‖Ψᵢ‖.
struct FinerResult {
  FinerStatus status = FinerStatus::absent;
  std::vector<int> h;
  double residual = 0.0;
  std::string reason;

  bool found() const noexcept { return status == FinerStatus::found; }
};

/// Searches for the surjective map h: 𝒟′ → 𝒟 with Ψᵢ = Σ_{h(j)=i} Ψ′ⱼ within `tol`.
/// Greedy overlap matching first, then rounding of a least-squares fit, then
/// exhaustive backtracking when |𝒟′| ≤ 12.
FinerResult is_finer(const Decomposition& dp, const Decomposition& d, double tol = 1e-8);

/// Relative group-sum residual of a given map; infinity when h is not surjective.
double refinement_residual(const Decomposition& dp, const Decomposition& d, const std::vector<int>& h);

}  // namespace psd
