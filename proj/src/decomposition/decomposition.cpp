#include "psd/decomposition/decomposition.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "psd/core/errors.hpp"

namespace psd {

Decomposition::Decomposition(std::vector<WaveFunction> components, WaveFunction parent)
    : components_(std::move(components)), parent_(std::move(parent)) {
  if (components_.empty()) throw InvalidArgument("a decomposition needs at least one component");
  if (components_.size() > 30) throw InvalidArgument("decompositions are limited to 30 components");
  for (const auto& c : components_)
    if (!c.compatible(parent_)) throw GridMismatch("decomposition components and parent differ in layout");
}

Decomposition Decomposition::from_components(std::vector<WaveFunction> components) {
  if (components.empty()) throw InvalidArgument("a decomposition needs at least one component");
  WaveFunction sum(components.front().grid(), components.front().internal());
  for (const auto& c : components) sum += c;
  return Decomposition(std::move(components), std::move(sum));
}

WaveFunction Decomposition::subset_sum(std::uint32_t mask) const {
  WaveFunction out(parent_.grid(), parent_.internal());
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (mask & (1u << i)) out += components_[i];
  return out;
}

WaveFunction Decomposition::component_sum() const {
  return subset_sum(static_cast<std::uint32_t>((std::uint64_t{1} << components_.size()) - 1));
}

double gram_min_eigenvalue(const Decomposition& d) {
  const std::size_t n = d.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = d[i].norm();
  Eigen::MatrixXcd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Complex v = (norms[i] > 0 && norms[j] > 0) ? inner(d[i], d[j]) / (norms[i] * norms[j]) : Complex{};
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ValidationReport validate(const Decomposition& d, const Tolerances& tol) {
  ValidationReport r;
  r.tolerances = tol;
  const double pn = d.parent().norm();
  const double diff = (d.component_sum() - d.parent()).norm();
  r.sum_residual = pn > 0 ? diff / pn : diff;
  r.sum_ok = r.sum_residual <= tol.sum;
  r.min_component_norm = std::numeric_limits<double>::infinity();
  for (const auto& c : d.components()) r.min_component_norm = std::min(r.min_component_norm, c.norm());
  r.nonzero = r.min_component_norm >= tol.min_norm;
  r.gram_min_eigenvalue = r.nonzero ? gram_min_eigenvalue(d) : 0.0;
  r.independent = r.nonzero && r.gram_min_eigenvalue > tol.gram;
  return r;
}

std::string ValidationReport::summary() const {
  if (passed()) return "valid";
  std::string s;
  if (!sum_ok) s += fmt::format("sum residual {:.3e} > {:.1e}; ", sum_residual, tolerances.sum);
  if (!nonzero) s += fmt::format("component norm {:.3e} < {:.1e}; ", min_component_norm, tolerances.min_norm);
  if (nonzero && !independent)
    s += fmt::format("linear dependence: Gram eigenvalue {:.3e} <= {:.1e}; ", gram_min_eigenvalue, tolerances.gram);
  s.resize(s.size() - 2);
  return s;
}

Decomposition decompose_by_partition(const WaveFunction& psi, const Partition& part) {
  if (!(psi.grid() == part.grid())) throw GridMismatch("partition lives on a different grid");
  std::vector<WaveFunction> comps;
  comps.reserve(static_cast<std::size_t>(part.blocks()));
  for (int b = 0; b < part.blocks(); ++b) {
    comps.push_back(project(psi, part.block(b)));
    if (comps.back().norm_squared() == 0.0)
      throw InvalidArgument(fmt::format("partition block {} carries no amplitude", b));
  }
  return Decomposition(std::move(comps), psi);
}

}  // namespace psd
