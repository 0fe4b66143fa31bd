#include "psd/tree/permanence.hpp"

#include <cmath>

#include "psd/core/errors.hpp"

namespace psd {

SampleClock::SampleClock(const Dynamics& dyn, double horizon, double sample_dt) : dt(dyn.dt()) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!(sample_dt >= dt * (1.0 - 1e-9))) throw InvalidArgument("sample interval must be at least one step");
  steps_per_sample = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_dt / dt)));
  samples = 1 + dyn.steps_for(horizon) / steps_per_sample;
}

PermanenceReport w_plus(const Decomposition& d, const Dynamics& dyn, double horizon, double sample_dt,
                        const WOptions& options) {
  if (!(d.grid() == dyn.grid())) throw GridMismatch("decomposition and dynamics live on different grids");
  const SampleClock clock(dyn, horizon, sample_dt);
  PermanenceReport rep;
  rep.horizon = clock.horizon();
  std::vector<WaveFunction> comps = d.components();
  for (std::size_t k = 0; k < clock.samples; ++k) {
    if (k > 0) dyn.advance(comps, clock.time(k - 1), clock.steps_per_sample);
    const double w = w_optimize(Decomposition::from_components(comps), options).value;
    rep.times.push_back(clock.time(k));
    rep.values.push_back(w);
    if (k == 0 || w > rep.w_plus) {
      rep.w_plus = w;
      rep.worst_time = clock.time(k);
    }
  }
  return rep;
}

PsdCheckReport check_psd_partition(const Partition& part, const WaveFunction& psi, const Dynamics& dyn,
                                   double horizon, double sample_dt, double tol, const WOptions& options) {
  const Decomposition d = decompose_by_partition(psi, part);
  const SampleClock clock(dyn, horizon, sample_dt);
  PsdCheckReport rep;
  rep.tolerance = tol;
  std::vector<WaveFunction> comps = d.components();
  for (std::size_t k = 0; k < clock.samples; ++k) {
    if (k > 0) dyn.advance(comps, clock.time(k - 1), clock.steps_per_sample);
    WReport w = w_optimize(Decomposition::from_components(comps), options);
    rep.times.push_back(clock.time(k));
    rep.residuals.push_back(w.value);
    rep.witnesses.push_back(std::move(w.partition));
    if (k == 0 || w.value > rep.worst_residual) {
      rep.worst_residual = w.value;
      rep.worst_time = clock.time(k);
    }
  }
  rep.passed = rep.worst_residual <= tol;
  return rep;
}

}  // namespace psd
