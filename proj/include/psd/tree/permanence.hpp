#pragma once

#include <vector>

#include "psd/core/dynamics.hpp"
#include "psd/decomposition/overlap.hpp"

namespace psd {

/// Sample clock t = 0, Δ, 2Δ, … ≤ horizon where Δ is sample_dt rounded to whole steps.
struct SampleClock {
  std::size_t steps_per_sample = 1;
  std::size_t samples = 1;  // including t = 0
  double dt = 0.0;

  SampleClock(const Dynamics& dyn, double horizon, double sample_dt);
  double time(std::size_t k) const noexcept { return static_cast<double>(k * steps_per_sample) * dt; }
  double horizon() const noexcept { return time(samples - 1); }
};

/// sup_t w[U(t)𝒟] over a finite horizon.
struct PermanenceReport {
  double w_plus = 0.0;
  double horizon = 0.0;  // effective horizon actually covered
  std::vector<double> times;
  std::vector<double> values;
  double worst_time = 0.0;
};

/// Evolves each component independently and scores w at every sample.
PermanenceReport w_plus(const Decomposition& d, const Dynamics& dyn, double horizon, double sample_dt,
                        const WOptions& options = {});

struct PsdCheckReport {
  bool passed = false;
  double tolerance = 0.0;
  double worst_residual = 0.0;
  double worst_time = 0.0;
  std::vector<double> times;
  std::vector<double> residuals;
  std::vector<Partition> witnesses;  // 𝔛_t per sample
};

/// Whether E(𝒴)Ψ stays an exact spatial decomposition up to `tol` along the evolution:
/// at each sample some partition 𝔛_t keeps every subset residual below tol.
PsdCheckReport check_psd_partition(const Partition& part, const WaveFunction& psi, const Dynamics& dyn,
                                   double horizon, double sample_dt, double tol, const WOptions& options = {});

}  // namespace psd
