#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace psd {

using Complex = std::complex<double>;

/// Uniform cell-centered grid over a 1D or 2D configuration space.
///
/// Cells are stored row-major: the flat index of cell (i, j) is i * cells(1) + j.
/// A 1D grid reports cells(1) == 1 and spacing(1) == 1 so that volume and
/// indexing formulas are shared with the 2D case.
class Grid {
 public:
  /// 1D grid of `cells` cells spanning [lower, lower + extent).
  static Grid line(std::size_t cells, double extent, double lower);
  /// 1D grid centered on the origin.
  static Grid line(std::size_t cells, double extent);
  /// 2D grid centered on the origin.
  static Grid plane(std::array<std::size_t, 2> cells, std::array<double, 2> extent);
  static Grid plane(std::array<std::size_t, 2> cells, std::array<double, 2> extent,
                    std::array<double, 2> lower);

  int dims() const noexcept { return dims_; }
  std::size_t cells(int axis) const noexcept { return cells_[axis]; }
  double extent(int axis) const noexcept { return extent_[axis]; }
  double lower(int axis) const noexcept { return lower_[axis]; }
  double upper(int axis) const noexcept { return lower_[axis] + extent_[axis]; }
  double spacing(int axis) const noexcept { return extent_[axis] / static_cast<double>(cells_[axis]); }

  std::size_t size() const noexcept { return cells_[0] * cells_[1]; }
  double cell_volume() const noexcept { return spacing(0) * spacing(1); }

  /// Coordinate of the center of cell `i` along `axis`.
  double center(int axis, std::size_t i) const noexcept {
    return lower_[axis] + (static_cast<double>(i) + 0.5) * spacing(axis);
  }
  std::size_t index(std::size_t i, std::size_t j = 0) const noexcept { return i * cells_[1] + j; }
  std::array<std::size_t, 2> unravel(std::size_t flat) const noexcept {
    return {flat / cells_[1], flat % cells_[1]};
  }
  /// Cell-center position of a flat index (second coordinate is 0 in 1D).
  std::array<double, 2> position(std::size_t flat) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dims, std::array<std::size_t, 2> cells, std::array<double, 2> extent,
       std::array<double, 2> lower);

  int dims_ = 1;
  std::array<std::size_t, 2> cells_{1, 1};
  std::array<double, 2> extent_{1.0, 1.0};
  std::array<double, 2> lower_{0.0, 0.0};
};

}  // namespace psd
