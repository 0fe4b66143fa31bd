#include "psd/core/evolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

std::array<std::ptrdiff_t, 2> strides(const Grid& g, std::size_t internal) {
  return {static_cast<std::ptrdiff_t>(g.cells(1) * internal), static_cast<std::ptrdiff_t>(internal)};
}

// In-place guru plan over `axes` with every remaining index as a batch dimension.
fftw_plan make_plan(const Grid& g, std::size_t internal, const std::vector<int>& axes, int sign) {
  const auto st = strides(g, internal);
  std::vector<fftw_iodim> dims;
  std::vector<fftw_iodim> batch;
  for (int a = 0; a < g.dims(); ++a) {
    fftw_iodim d{static_cast<int>(g.cells(a)), static_cast<int>(st[a]), static_cast<int>(st[a])};
    bool transformed = false;
    for (int t : axes) transformed = transformed || t == a;
    (transformed ? dims : batch).push_back(d);
  }
  batch.push_back(fftw_iodim{static_cast<int>(internal), 1, 1});
  std::vector<Complex> scratch(g.size() * internal);
  std::lock_guard lock(planner_mutex());
  fftw_plan p = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(), static_cast<int>(batch.size()),
                                   batch.data(), as_fftw(scratch.data()), as_fftw(scratch.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw Error("FFTW could not create a plan");
  return p;
}

void destroy_plan(fftw_plan p) {
  if (p == nullptr) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(p);
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  PlanPair(const Grid& g, std::size_t internal, const std::vector<int>& axes)
      : forward(make_plan(g, internal, axes, FFTW_FORWARD)), backward(make_plan(g, internal, axes, FFTW_BACKWARD)) {}
  ~PlanPair() {
    destroy_plan(forward);
    destroy_plan(backward);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

void check_finite(const WaveFunction& psi) {
  if (!psi.all_finite()) throw NumericalAbort("non-finite amplitudes during evolution (overflow or unstable step)");
}

}  // namespace

EvolutionEngine EvolutionEngine::free(const Grid& grid, double mass, double dt) {
  return free(grid, {mass, mass}, dt);
}

EvolutionEngine EvolutionEngine::free(const Grid& grid, std::array<double, 2> mass, double dt) {
  return EvolutionEngine{grid, std::vector<double>(grid.size(), 0.0), mass, dt};
}

void EvolutionEngine::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive and finite");
  if (potential.size() != grid.size()) throw InvalidArgument("potential size does not match grid");
  for (double v : potential)
    if (!std::isfinite(v)) throw InvalidArgument("potential contains non-finite values");
  for (int a = 0; a < grid.dims(); ++a)
    if (!(mass[a] > 0.0) || !std::isfinite(mass[a]))
      throw InvalidArgument("mass along axis " + std::to_string(a) + " must be positive");
}

std::vector<double> wave_numbers(const Grid& grid, int axis) {
  const std::size_t n = grid.cells(axis);
  const double dk = 2.0 * std::numbers::pi / grid.extent(axis);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<double>(j);
    k[j] = dk * (j < (n + 1) / 2 ? jj : jj - static_cast<double>(n));
  }
  return k;
}

struct SplitStepPropagator::Plans {
  PlanPair full;
  Plans(const Grid& g, std::size_t internal)
      : full(g, internal, g.dims() == 2 ? std::vector<int>{0, 1} : std::vector<int>{0}) {}
};

SplitStepPropagator::SplitStepPropagator(const EvolutionEngine& engine, std::size_t internal)
    : grid_(engine.grid), internal_(internal), dt_(engine.dt) {
  engine.validate();
  if (internal_ == 0) throw InvalidArgument("internal dimension must be positive");
  const std::size_t n = grid_.size();
  half_potential_.resize(n);
  full_potential_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    half_potential_[c] = std::polar(1.0, -0.5 * dt_ * engine.potential[c]);
    full_potential_[c] = std::polar(1.0, -dt_ * engine.potential[c]);
  }
  const auto kx = wave_numbers(grid_, 0);
  const auto ky = grid_.dims() == 2 ? wave_numbers(grid_, 1) : std::vector<double>{0.0};
  kinetic_.resize(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, j] = grid_.unravel(c);
    double e = kx[i] * kx[i] / (2.0 * engine.mass[0]);
    if (grid_.dims() == 2) e += ky[j] * ky[j] / (2.0 * engine.mass[1]);
    // The inverse transform is unnormalized; fold 1/N into the phase.
    kinetic_[c] = std::polar(inv, -dt_ * e);
  }
  plans_ = std::make_unique<Plans>(grid_, internal_);
}

SplitStepPropagator::~SplitStepPropagator() = default;

void SplitStepPropagator::apply_kinetic(WaveFunction& psi) {
  auto a = psi.amplitudes();
  fftw_execute_dft(plans_->full.forward, as_fftw(a.data()), as_fftw(a.data()));
  for (std::size_t c = 0; c < kinetic_.size(); ++c)
    for (std::size_t s = 0; s < internal_; ++s) a[c * internal_ + s] *= kinetic_[c];
  fftw_execute_dft(plans_->full.backward, as_fftw(a.data()), as_fftw(a.data()));
}

void SplitStepPropagator::advance(WaveFunction& psi, std::size_t steps) {
  if (!(psi.grid() == grid_) || psi.internal() != internal_)
    throw GridMismatch("wave function does not match the propagator layout");
  if (steps == 0) return;
  auto a = psi.amplitudes();
  auto potential = [&](const std::vector<Complex>& phase) {
    for (std::size_t c = 0; c < phase.size(); ++c)
      for (std::size_t s = 0; s < internal_; ++s) a[c * internal_ + s] *= phase[c];
  };
  // Adjacent half potential steps of consecutive Strang steps are merged.
  potential(half_potential_);
  for (std::size_t k = 0; k < steps; ++k) {
    apply_kinetic(psi);
    potential(k + 1 == steps ? half_potential_ : full_potential_);
  }
  check_finite(psi);
}

Evolved evolve(const WaveFunction& psi, const EvolutionEngine& engine, double t) {
  engine.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("evolution time must be non-negative");
  if (!(psi.grid() == engine.grid)) throw GridMismatch("wave function and engine live on different grids");
  // Tolerate t = k·dt computed in floating point.
  const auto steps = static_cast<std::size_t>(std::floor(t / engine.dt + 1e-9));
  WaveFunction out = psi;
  if (steps > 0) {
    SplitStepPropagator prop(engine, psi.internal());
    prop.advance(out, steps);
  }
  return {std::move(out), static_cast<double>(steps) * engine.dt, steps};
}

void translate(WaveFunction& psi, int axis, const std::function<double(std::size_t, std::size_t)>& shift) {
  const Grid& g = psi.grid();
  if (axis < 0 || axis >= g.dims()) throw InvalidArgument("translation axis out of range");
  const std::size_t internal = psi.internal();
  PlanPair plans(g, internal, {axis});
  auto a = psi.amplitudes();
  fftw_execute_dft(plans.forward, as_fftw(a.data()), as_fftw(a.data()));
  const auto k = wave_numbers(g, axis);
  const double inv = 1.0 / static_cast<double>(g.cells(axis));
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto [i, j] = g.unravel(c);
    const std::size_t along = axis == 0 ? i : j;
    const std::size_t line = axis == 0 ? j : i;
    for (std::size_t s = 0; s < internal; ++s) {
      const double d = shift(line, s);
      a[c * internal + s] *= std::polar(inv, -k[along] * d);
    }
  }
  fftw_execute_dft(plans.backward, as_fftw(a.data()), as_fftw(a.data()));
  check_finite(psi);
}

WaveFunction momentum_filter(const WaveFunction& psi, int axis, const std::function<bool(double)>& keep) {
  const Grid& g = psi.grid();
  if (axis < 0 || axis >= g.dims()) throw InvalidArgument("filter axis out of range");
  WaveFunction out = psi;
  PlanPair plans(g, psi.internal(), {axis});
  auto a = out.amplitudes();
  fftw_execute_dft(plans.forward, as_fftw(a.data()), as_fftw(a.data()));
  const auto k = wave_numbers(g, axis);
  const double inv = 1.0 / static_cast<double>(g.cells(axis));
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto [i, j] = g.unravel(c);
    const Complex f = keep(k[axis == 0 ? i : j]) ? inv : 0.0;
    for (auto& v : out.cell(c)) v *= f;
  }
  fftw_execute_dft(plans.backward, as_fftw(a.data()), as_fftw(a.data()));
  return out;
}

double mean_momentum(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid();
  if (axis < 0 || axis >= g.dims()) throw InvalidArgument("momentum axis out of range");
  WaveFunction spec = psi;
  PlanPair plans(g, psi.internal(), {axis});
  auto a = spec.amplitudes();
  fftw_execute_dft(plans.forward, as_fftw(a.data()), as_fftw(a.data()));
  const auto k = wave_numbers(g, axis);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto [i, j] = g.unravel(c);
    const double d = spec.cell_density(c);
    num += d * k[axis == 0 ? i : j];
    den += d;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace psd
