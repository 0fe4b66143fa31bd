#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "psd/core/evolution.hpp"

namespace psd {

/// A time-dependent unitary U(t₁, t₀) realized as a sequence of fixed steps.
///
/// Permanence and tree analyses only need to push states forward on a common
/// clock; they do not care how the Hamiltonian is assembled.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual double dt() const noexcept = 0;
  virtual const Grid& grid() const noexcept = 0;
  /// Advances every state from `t0` by `steps` steps, in place.
  virtual void advance(std::span<WaveFunction> states, double t0, std::size_t steps) const = 0;

  /// Number of whole steps covering `duration` (rounded down).
  std::size_t steps_for(double duration) const;
};

/// Time-independent Hamiltonian.
class StaticDynamics final : public Dynamics {
 public:
  explicit StaticDynamics(EvolutionEngine engine);
  double dt() const noexcept override { return engine_.dt; }
  const Grid& grid() const noexcept override { return engine_.grid; }
  void advance(std::span<WaveFunction> states, double t0, std::size_t steps) const override;
  const EvolutionEngine& engine() const noexcept { return engine_; }

 private:
  EvolutionEngine engine_;
};

/// Piecewise-constant Hamiltonian. Stage k is active for t in [start_k, start_{k+1}).
/// A stage may add a conditional translation: after each step, line `line` of
/// internal component `s` moves along `axis` by velocity(line, s)·dt.
struct Stage {
  double start = 0.0;
  EvolutionEngine engine;
  struct Drift {
    int axis = 0;
    std::function<double(std::size_t, std::size_t)> velocity;
  };
  std::optional<Drift> drift;
};

class StagedDynamics final : public Dynamics {
 public:
  /// Stages must share grid and dt and have increasing start times; the first starts at 0.
  explicit StagedDynamics(std::vector<Stage> stages);
  double dt() const noexcept override { return stages_.front().engine.dt; }
  const Grid& grid() const noexcept override { return stages_.front().engine.grid; }
  void advance(std::span<WaveFunction> states, double t0, std::size_t steps) const override;
  const std::vector<Stage>& stages() const noexcept { return stages_; }

 private:
  std::size_t stage_at(double t) const;
  std::vector<Stage> stages_;
};

}  // namespace psd
