#include "common.hpp"

#include <algorithm>
#include <cmath>

namespace psd::detail {

double edge_mass(const WaveFunction& psi, int axis, double fraction) {
  const Grid& g = psi.grid();
  const auto n = g.cells(axis);
  const auto band = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
  double edge = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto idx = g.unravel(c)[axis];
    if (idx < band || idx >= n - band) edge += psi.cell_density(c);
  }
  return edge * g.cell_volume() / std::max(psi.norm_squared(), 1e-300);
}

double pair_w(const std::vector<double>& da, const std::vector<double>& db, double cell_volume) {
  double overlap = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t c = 0; c < da.size(); ++c) {
    overlap += std::min(da[c], db[c]);
    na += da[c];
    nb += db[c];
  }
  const double denom = std::min(na, nb) * cell_volume;
  return denom > 0.0 ? std::sqrt(overlap * cell_volume / denom) : 0.0;
}

}  // namespace psd::detail
