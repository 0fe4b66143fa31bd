#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "psd/core/grid.hpp"
#include "psd/core/wavefunction.hpp"

namespace psd {

/// Subset of grid cells; the argument of the projection-valued measure E(Δ).
class Region {
 public:
  Region(Grid grid, std::vector<std::uint8_t> members);

  static Region all(const Grid& grid);
  static Region none(const Grid& grid);
  /// Cells whose center satisfies `pred(x, y)` (y = 0 in 1D).
  static Region where(const Grid& grid, const std::function<bool(double, double)>& pred);

  const Grid& grid() const noexcept { return grid_; }
  bool contains(std::size_t cell) const noexcept { return members_[cell] != 0; }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  Region complement() const;

 private:
  Grid grid_;
  std::vector<std::uint8_t> members_;
};

/// Labeling of every grid cell with a block index in [0, blocks).
///
/// Ordinary partitions have no empty blocks. `witness` builds a labeling that
/// may leave blocks empty, as happens for optimizers of the overlap functional
/// where one block is best assigned nothing.
class Partition {
 public:
  Partition(Grid grid, std::vector<int> labels, int blocks);

  static Partition witness(Grid grid, std::vector<int> labels, int blocks);
  static Partition single(const Grid& grid);
  /// Two blocks split at `threshold` along `axis`: block 0 below, block 1 at or above.
  static Partition split(const Grid& grid, int axis, double threshold);

  const Grid& grid() const noexcept { return grid_; }
  int blocks() const noexcept { return blocks_; }
  int label(std::size_t cell) const noexcept { return labels_[cell]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  bool has_empty_blocks() const;
  Region block(int b) const;

  bool operator==(const Partition& other) const {
    return grid_ == other.grid_ && blocks_ == other.blocks_ && labels_ == other.labels_;
  }

 private:
  struct AllowEmpty {};
  Partition(Grid grid, std::vector<int> labels, int blocks, AllowEmpty);

  Grid grid_;
  std::vector<int> labels_;
  int blocks_;
};

/// E(Δ)ψ: amplitudes outside the region set to zero.
WaveFunction project(const WaveFunction& psi, const Region& region);

}  // namespace psd
