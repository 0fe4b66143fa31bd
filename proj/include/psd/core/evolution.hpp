#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "psd/core/grid.hpp"
#include "psd/core/wavefunction.hpp"

namespace psd {

/// Hamiltonian H = Σ_axis p²/(2 m_axis) + V(x) on a periodic grid, with a fixed step.
struct EvolutionEngine {
  Grid grid;
  std::vector<double> potential;  // one real value per cell
  std::array<double, 2> mass{1.0, 1.0};
  double dt = 0.01;

  static EvolutionEngine free(const Grid& grid, double mass, double dt);
  static EvolutionEngine free(const Grid& grid, std::array<double, 2> mass, double dt);

  /// Throws InvalidArgument when the engine is unusable.
  void validate() const;
};

/// Strang-split spectral propagator bound to one engine and one internal dimension.
/// Owns its FFTW plans; not copyable. Distinct instances may run concurrently.
class SplitStepPropagator {
 public:
  explicit SplitStepPropagator(const EvolutionEngine& engine, std::size_t internal = 1);
  ~SplitStepPropagator();
  SplitStepPropagator(const SplitStepPropagator&) = delete;
  SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

  /// Advances `psi` in place by `steps` full steps. Throws NumericalAbort on overflow.
  void advance(WaveFunction& psi, std::size_t steps);

  double dt() const noexcept { return dt_; }

 private:
  struct Plans;
  Grid grid_;
  std::size_t internal_;
  double dt_;
  std::vector<Complex> half_potential_;
  std::vector<Complex> full_potential_;
  std::vector<Complex> kinetic_;
  std::unique_ptr<Plans> plans_;

  void apply_kinetic(WaveFunction& psi);
};

struct Evolved {
  WaveFunction state;
  double elapsed;  // effective time: t rounded down to a whole number of steps
  std::size_t steps;
};

/// U(t)ψ. `t` is rounded down to a multiple of dt; the effective time is reported.
Evolved evolve(const WaveFunction& psi, const EvolutionEngine& engine, double t);

/// Angular wave numbers of the discrete transform along `axis`, in FFT order.
std::vector<double> wave_numbers(const Grid& grid, int axis);

/// Translates every line along `axis` by a line-dependent distance, spectrally.
/// `shift(line, s)` receives the index along the other axis (0 in 1D) and the
/// internal component. Exact for band-limited data; periodic wrap-around.
void translate(WaveFunction& psi, int axis, const std::function<double(std::size_t, std::size_t)>& shift);

/// Spectral projection keeping the plane waves along `axis` whose wave number passes `keep`.
WaveFunction momentum_filter(const WaveFunction& psi, int axis, const std::function<bool(double)>& keep);

/// ⟨p⟩ along `axis` from the spectral first moment (ħ = 1).
double mean_momentum(const WaveFunction& psi, int axis);

}  // namespace psd
