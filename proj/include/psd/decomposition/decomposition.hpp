#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psd/core/region.hpp"
#include "psd/core/wavefunction.hpp"

namespace psd {

struct Tolerances {
  double sum = 1e-8;       // relative norm of Σ components − parent
  double gram = 1e-6;      // smallest eigenvalue of the normalized Gram matrix
  double min_norm = 1e-12;
};

/// Ordered components Ψ₁…Ψₙ on a shared grid with a declared parent Ψ.
/// Construction only checks layout; `validate` checks the algebraic invariants.
class Decomposition {
 public:
  Decomposition(std::vector<WaveFunction> components, WaveFunction parent);
  /// Parent set to the sum of the components.
  static Decomposition from_components(std::vector<WaveFunction> components);

  std::size_t size() const noexcept { return components_.size(); }
  const WaveFunction& operator[](std::size_t i) const noexcept { return components_[i]; }
  const std::vector<WaveFunction>& components() const noexcept { return components_; }
  const WaveFunction& parent() const noexcept { return parent_; }
  const Grid& grid() const noexcept { return parent_.grid(); }

  /// Ψ_I for the subset encoded by bit mask `mask`.
  WaveFunction subset_sum(std::uint32_t mask) const;
  WaveFunction component_sum() const;

 private:
  std::vector<WaveFunction> components_;
  WaveFunction parent_;
};

struct ValidationReport {
  double sum_residual = 0.0;
  double gram_min_eigenvalue = 0.0;
  double min_component_norm = 0.0;
  bool sum_ok = false;
  bool independent = false;
  bool nonzero = false;
  Tolerances tolerances;

  bool passed() const noexcept { return sum_ok && independent && nonzero; }
  std::string summary() const;
};

ValidationReport validate(const Decomposition& d, const Tolerances& tol = {});

/// Smallest eigenvalue of the Gram matrix of the normalized components.
double gram_min_eigenvalue(const Decomposition& d);

/// E(𝔛)Ψ. Throws InvalidArgument when a block carries no amplitude.
Decomposition decompose_by_partition(const WaveFunction& psi, const Partition& part);

}  // namespace psd
