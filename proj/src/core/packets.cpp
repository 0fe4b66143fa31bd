#include "psd/core/packets.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "psd/core/errors.hpp"

namespace psd {

double gaussian_envelope(double x, double center, double width) {
  const double u = (x - center) / width;
  return std::exp(-0.5 * u * u);
}

WaveFunction gaussian_packet(const Grid& grid, double center, double momentum, double width, double phase) {
  return gaussian_packet(grid, {center, 0.0}, {momentum, 0.0}, {width, 1.0}, phase);
}

WaveFunction gaussian_packet(const Grid& grid, std::array<double, 2> center, std::array<double, 2> momentum,
                             std::array<double, 2> width, double phase) {
  for (int a = 0; a < grid.dims(); ++a) {
    if (!(width[a] > 0.0)) throw InvalidArgument("packet width must be positive");
    if (width[a] < 2.0 * grid.spacing(a))
      throw InvalidArgument("packet width " + std::to_string(width[a]) + " is below two cells on axis " +
                            std::to_string(a));
    const double margin = std::min(center[a] - grid.lower(a), grid.upper(a) - center[a]);
    if (margin < 6.0 * width[a])
      spdlog::warn("packet at {} on axis {} is within 6 widths of the grid boundary", center[a], a);
  }
  WaveFunction psi(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.position(c);
    double env = 1.0;
    double arg = phase;
    for (int a = 0; a < grid.dims(); ++a) {
      env *= gaussian_envelope(x[a], center[a], width[a]);
      arg += momentum[a] * (x[a] - center[a]);
    }
    psi(c) = std::polar(env, arg);
  }
  return psi.normalized();
}

}  // namespace psd
