#include "psd/core/grid.hpp"

#include <cmath>
#include <string>

#include "psd/core/errors.hpp"

namespace psd {

Grid::Grid(int dims, std::array<std::size_t, 2> cells, std::array<double, 2> extent,
           std::array<double, 2> lower)
    : dims_(dims), cells_(cells), extent_(extent), lower_(lower) {
  if (dims != 1 && dims != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  for (int a = 0; a < dims; ++a) {
    if (cells_[a] == 0) throw InvalidArgument("grid axis " + std::to_string(a) + " has no cells");
    if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]))
      throw InvalidArgument("grid axis " + std::to_string(a) + " has non-positive extent");
    if (!std::isfinite(lower_[a])) throw InvalidArgument("grid lower bound is not finite");
  }
}

Grid Grid::line(std::size_t cells, double extent, double lower) {
  return Grid(1, {cells, 1}, {extent, 1.0}, {lower, 0.0});
}

Grid Grid::line(std::size_t cells, double extent) { return line(cells, extent, -0.5 * extent); }

Grid Grid::plane(std::array<std::size_t, 2> cells, std::array<double, 2> extent) {
  return plane(cells, extent, {-0.5 * extent[0], -0.5 * extent[1]});
}

Grid Grid::plane(std::array<std::size_t, 2> cells, std::array<double, 2> extent,
                 std::array<double, 2> lower) {
  return Grid(2, cells, extent, lower);
}

std::array<double, 2> Grid::position(std::size_t flat) const noexcept {
  const auto [i, j] = unravel(flat);
  return {center(0, i), dims_ == 2 ? center(1, j) : 0.0};
}

}  // namespace psd
