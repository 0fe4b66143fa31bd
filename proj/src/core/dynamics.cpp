#include "psd/core/dynamics.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

// One propagator per internal dimension present in the batch.
using PropagatorCache = std::map<std::size_t, std::unique_ptr<SplitStepPropagator>>;

SplitStepPropagator& propagator_for(PropagatorCache& cache, const EvolutionEngine& e, std::size_t internal) {
  auto& slot = cache[internal];
  if (!slot) slot = std::make_unique<SplitStepPropagator>(e, internal);
  return *slot;
}

}  // namespace

std::size_t Dynamics::steps_for(double duration) const {
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be non-negative");
  return static_cast<std::size_t>(std::floor(duration / dt() + 1e-9));
}

StaticDynamics::StaticDynamics(EvolutionEngine engine) : engine_(std::move(engine)) { engine_.validate(); }

void StaticDynamics::advance(std::span<WaveFunction> states, double, std::size_t steps) const {
  if (steps == 0) return;
  PropagatorCache cache;
  for (WaveFunction& psi : states) {
    if (!(psi.grid() == engine_.grid)) throw GridMismatch("state and dynamics live on different grids");
    propagator_for(cache, engine_, psi.internal()).advance(psi, steps);
  }
}

StagedDynamics::StagedDynamics(std::vector<Stage> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw InvalidArgument("staged dynamics needs at least one stage");
  if (stages_.front().start != 0.0) throw InvalidArgument("first stage must start at t = 0");
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    stages_[k].engine.validate();
    if (!(stages_[k].engine.grid == stages_.front().engine.grid))
      throw GridMismatch("all stages must share one grid");
    if (stages_[k].engine.dt != stages_.front().engine.dt) throw InvalidArgument("all stages must share dt");
    if (k > 0 && !(stages_[k].start > stages_[k - 1].start))
      throw InvalidArgument("stage start times must increase");
  }
}

std::size_t StagedDynamics::stage_at(double t) const {
  std::size_t k = 0;
  while (k + 1 < stages_.size() && stages_[k + 1].start <= t) ++k;
  return k;
}

void StagedDynamics::advance(std::span<WaveFunction> states, double t0, std::size_t steps) const {
  const double h = dt();
  std::size_t done = 0;
  while (done < steps) {
    // Stage membership is decided at the step midpoint, which is robust to clock round-off.
    const std::size_t k = stage_at(t0 + (static_cast<double>(done) + 0.5) * h);
    std::size_t run = 1;
    while (done + run < steps && stage_at(t0 + (static_cast<double>(done + run) + 0.5) * h) == k) ++run;
    const Stage& st = stages_[k];
    PropagatorCache cache;
    for (WaveFunction& psi : states) {
      if (!(psi.grid() == grid())) throw GridMismatch("state and dynamics live on different grids");
      auto& prop = propagator_for(cache, st.engine, psi.internal());
      if (!st.drift) {
        prop.advance(psi, run);
        continue;
      }
      for (std::size_t s = 0; s < run; ++s) {
        prop.advance(psi, 1);
        translate(psi, st.drift->axis,
                  [&](std::size_t line, std::size_t comp) { return st.drift->velocity(line, comp) * h; });
      }
    }
    done += run;
  }
}

}  // namespace psd
