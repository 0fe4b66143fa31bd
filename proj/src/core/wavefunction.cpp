#include "psd/core/wavefunction.hpp"

#include <cmath>

#include "psd/core/errors.hpp"

namespace psd {

WaveFunction::WaveFunction(Grid grid, std::size_t internal)
    : grid_(grid), internal_(internal), amps_(grid.size() * internal) {
  if (internal_ == 0) throw InvalidArgument("internal dimension must be positive");
}

WaveFunction::WaveFunction(Grid grid, std::vector<Complex> amplitudes, std::size_t internal)
    : grid_(grid), internal_(internal), amps_(std::move(amplitudes)) {
  if (internal_ == 0) throw InvalidArgument("internal dimension must be positive");
  if (amps_.size() != grid_.size() * internal_)
    throw InvalidArgument("amplitude count does not match grid cells x internal dimension");
}

double WaveFunction::cell_density(std::size_t c) const noexcept {
  double d = 0.0;
  for (const Complex& a : cell(c)) d += std::norm(a);
  return d;
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> out(cells());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = cell_density(c);
  return out;
}

double WaveFunction::norm_squared() const noexcept {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return s * grid_.cell_volume();
}

double WaveFunction::norm() const noexcept { return std::sqrt(norm_squared()); }

bool WaveFunction::all_finite() const noexcept {
  for (const Complex& a : amps_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

WaveFunction& WaveFunction::operator+=(const WaveFunction& rhs) {
  if (!compatible(rhs)) throw GridMismatch("cannot add wave functions on different grids");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += rhs.amps_[i];
  return *this;
}

WaveFunction& WaveFunction::operator-=(const WaveFunction& rhs) {
  if (!compatible(rhs)) throw GridMismatch("cannot subtract wave functions on different grids");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= rhs.amps_[i];
  return *this;
}

WaveFunction& WaveFunction::operator*=(Complex factor) noexcept {
  for (Complex& a : amps_) a *= factor;
  return *this;
}

WaveFunction WaveFunction::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero wave function");
  return *this * Complex(1.0 / n, 0.0);
}

Complex inner(const WaveFunction& psi, const WaveFunction& phi) {
  if (!psi.compatible(phi)) throw GridMismatch("inner product of wave functions on different grids");
  const auto a = psi.amplitudes();
  const auto b = phi.amplitudes();
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * psi.grid().cell_volume();
}

double mean_position(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double d = psi.cell_density(c);
    num += d * g.position(c)[axis];
    den += d;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace psd
