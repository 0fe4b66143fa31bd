#pragma once

#include <array>

#include "psd/core/wavefunction.hpp"

namespace psd {

/// Normalized Gaussian ψ(x) ∝ exp(−(x−x₀)²/(2σ²) + i k·(x−x₀) + i·phase).
///
/// Throws InvalidArgument when σ is below two cells on any axis. Logs a
/// warning when the packet sits within six widths of a grid edge, since the
/// periodic boundary would then wrap its tail.
WaveFunction gaussian_packet(const Grid& grid, double center, double momentum, double width, double phase = 0.0);
WaveFunction gaussian_packet(const Grid& grid, std::array<double, 2> center, std::array<double, 2> momentum,
                             std::array<double, 2> width, double phase = 0.0);

/// Unnormalized 1D Gaussian amplitude with the same convention, for oracles.
double gaussian_envelope(double x, double center, double width);

}  // namespace psd
