#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psd/core/grid.hpp"

namespace psd {

/// Complex amplitude field over a grid.
///
/// Each cell may carry more than one amplitude (`internal() > 1`) for a
/// discrete non-configuration degree of freedom such as a qubit. Projections
/// act on cells only; densities sum over the internal index. Storage is
/// cell-major: amplitude (cell, s) lives at cell * internal() + s.
class WaveFunction {
 public:
  explicit WaveFunction(Grid grid, std::size_t internal = 1);
  WaveFunction(Grid grid, std::vector<Complex> amplitudes, std::size_t internal = 1);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t internal() const noexcept { return internal_; }
  std::size_t cells() const noexcept { return grid_.size(); }

  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> amplitudes() noexcept { return amps_; }
  std::span<const Complex> cell(std::size_t c) const noexcept {
    return {amps_.data() + c * internal_, internal_};
  }
  std::span<Complex> cell(std::size_t c) noexcept { return {amps_.data() + c * internal_, internal_}; }

  Complex& operator()(std::size_t c, std::size_t s = 0) noexcept { return amps_[c * internal_ + s]; }
  Complex operator()(std::size_t c, std::size_t s = 0) const noexcept { return amps_[c * internal_ + s]; }

  /// Σ_s |ψ(c, s)|², without the cell volume.
  double cell_density(std::size_t c) const noexcept;
  /// Per-cell density |ψ|² (no volume factor).
  std::vector<double> density() const;
  double norm_squared() const noexcept;
  double norm() const noexcept;
  bool all_finite() const noexcept;

  /// Same grid and internal dimension.
  bool compatible(const WaveFunction& other) const noexcept {
    return grid_ == other.grid_ && internal_ == other.internal_;
  }

  WaveFunction& operator+=(const WaveFunction& rhs);
  WaveFunction& operator-=(const WaveFunction& rhs);
  WaveFunction& operator*=(Complex factor) noexcept;

  friend WaveFunction operator+(WaveFunction lhs, const WaveFunction& rhs) { return lhs += rhs; }
  friend WaveFunction operator-(WaveFunction lhs, const WaveFunction& rhs) { return lhs -= rhs; }
  friend WaveFunction operator*(Complex f, WaveFunction psi) { return psi *= f; }
  friend WaveFunction operator*(WaveFunction psi, Complex f) { return psi *= f; }

  /// Returns a copy scaled to unit norm. Throws on a zero function.
  WaveFunction normalized() const;

  bool operator==(const WaveFunction& other) const {
    return compatible(other) && amps_ == other.amps_;
  }

 private:
  Grid grid_;
  std::size_t internal_;
  std::vector<Complex> amps_;
};

/// Σ conj(ψ)·φ·(cell volume). Throws GridMismatch if the layouts differ.
Complex inner(const WaveFunction& psi, const WaveFunction& phi);

/// Mean coordinate along `axis` weighted by |ψ|².
double mean_position(const WaveFunction& psi, int axis);

}  // namespace psd
