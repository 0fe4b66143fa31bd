#include "psd/core/region.hpp"

#include <algorithm>
#include <string>

#include "psd/core/errors.hpp"

namespace psd {

Region::Region(Grid grid, std::vector<std::uint8_t> members) : grid_(grid), members_(std::move(members)) {
  if (members_.size() != grid_.size()) throw InvalidArgument("region membership size does not match grid");
}

Region Region::all(const Grid& grid) { return Region(grid, std::vector<std::uint8_t>(grid.size(), 1)); }

Region Region::none(const Grid& grid) { return Region(grid, std::vector<std::uint8_t>(grid.size(), 0)); }

Region Region::where(const Grid& grid, const std::function<bool(double, double)>& pred) {
  std::vector<std::uint8_t> m(grid.size());
  for (std::size_t c = 0; c < m.size(); ++c) {
    const auto p = grid.position(c);
    m[c] = pred(p[0], p[1]) ? 1 : 0;
  }
  return Region(grid, std::move(m));
}

std::size_t Region::count() const noexcept {
  return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), std::uint8_t{1}));
}

Region Region::complement() const {
  std::vector<std::uint8_t> m(members_.size());
  for (std::size_t c = 0; c < m.size(); ++c) m[c] = members_[c] ? 0 : 1;
  return Region(grid_, std::move(m));
}

Partition::Partition(Grid grid, std::vector<int> labels, int blocks, AllowEmpty)
    : grid_(grid), labels_(std::move(labels)), blocks_(blocks) {
  if (blocks_ < 1) throw InvalidArgument("partition needs at least one block");
  if (labels_.size() != grid_.size()) throw InvalidArgument("partition label count does not match grid");
  for (int l : labels_)
    if (l < 0 || l >= blocks_) throw InvalidArgument("partition label out of range: " + std::to_string(l));
}

Partition::Partition(Grid grid, std::vector<int> labels, int blocks)
    : Partition(grid, std::move(labels), blocks, AllowEmpty{}) {
  if (has_empty_blocks()) throw InvalidArgument("partition has an empty block");
}

Partition Partition::witness(Grid grid, std::vector<int> labels, int blocks) {
  return Partition(grid, std::move(labels), blocks, AllowEmpty{});
}

Partition Partition::single(const Grid& grid) { return Partition(grid, std::vector<int>(grid.size(), 0), 1); }

Partition Partition::split(const Grid& grid, int axis, double threshold) {
  std::vector<int> labels(grid.size());
  for (std::size_t c = 0; c < labels.size(); ++c) labels[c] = grid.position(c)[axis] >= threshold ? 1 : 0;
  return Partition(grid, std::move(labels), 2);
}

bool Partition::has_empty_blocks() const {
  std::vector<char> used(static_cast<std::size_t>(blocks_), 0);
  for (int l : labels_) used[static_cast<std::size_t>(l)] = 1;
  return std::find(used.begin(), used.end(), 0) != used.end();
}

Region Partition::block(int b) const {
  std::vector<std::uint8_t> m(labels_.size());
  for (std::size_t c = 0; c < m.size(); ++c) m[c] = labels_[c] == b ? 1 : 0;
  return Region(grid_, std::move(m));
}

WaveFunction project(const WaveFunction& psi, const Region& region) {
  if (!(psi.grid() == region.grid())) throw GridMismatch("projection region lives on a different grid");
  WaveFunction out(psi.grid(), psi.internal());
  for (std::size_t c = 0; c < psi.cells(); ++c) {
    if (!region.contains(c)) continue;
    auto dst = out.cell(c);
    auto src = psi.cell(c);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

}  // namespace psd
