#include "psd/decomposition/finer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

constexpr std::size_t kExhaustiveLimit = 12;
constexpr std::uint64_t kNodeBudget = 20'000'000;

// Inner products needed to score any assignment without touching the grid again.
struct GramData {
  Eigen::MatrixXcd pp;  // ⟨Ψ′ⱼ, Ψ′ₖ⟩
  Eigen::MatrixXcd dp;  // ⟨Ψᵢ, Ψ′ⱼ⟩
  Eigen::VectorXd dd;   // ‖Ψᵢ‖²

  GramData(const Decomposition& fine, const Decomposition& coarse) {
    const auto m = static_cast<Eigen::Index>(fine.size());
    const auto n = static_cast<Eigen::Index>(coarse.size());
    pp.resize(m, m);
    dp.resize(n, m);
    dd.resize(n);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k) {
        pp(j, k) = inner(fine[j], fine[k]);
        pp(k, j) = std::conj(pp(j, k));
      }
    for (Eigen::Index i = 0; i < n; ++i) {
      dd(i) = coarse[i].norm_squared();
      for (Eigen::Index j = 0; j < m; ++j) dp(i, j) = inner(coarse[i], fine[j]);
    }
  }

  // Worst relative group residual from the Gram data; infinity if a group is empty.
  double residual(const std::vector<int>& h) const {
    const auto n = dd.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r2 = dd(i);
      bool used = false;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j] != i) continue;
        used = true;
        r2 -= 2.0 * dp(i, static_cast<Eigen::Index>(j)).real();
        for (std::size_t k = 0; k < h.size(); ++k)
          if (h[k] == i) r2 += pp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)).real();
      }
      if (!used) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::sqrt(std::max(r2, 0.0) / dd(i)));
    }
    return worst;
  }
};

std::vector<int> greedy_map(const GramData& g) {
  const auto n = g.dd.size();
  const auto m = g.pp.rows();
  std::vector<int> h(static_cast<std::size_t>(m), 0);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double pj = std::sqrt(g.pp(j, j).real());
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = std::abs(g.dp(i, j)) / (pj * std::sqrt(g.dd(i)));
      if (v > best) {
        best = v;
        h[static_cast<std::size_t>(j)] = static_cast<int>(i);
      }
    }
  }
  return h;
}

// Fit Ψᵢ ≈ Σⱼ cᵢⱼ Ψ′ⱼ and send each j to the coarse component with the largest coefficient.
std::vector<int> least_squares_map(const GramData& g) {
  const auto n = g.dd.size();
  const auto m = g.pp.rows();
  Eigen::MatrixXcd rhs = g.dp.adjoint();  // ⟨Ψ′ⱼ, Ψᵢ⟩
  Eigen::MatrixXcd c = g.pp.completeOrthogonalDecomposition().solve(rhs);  // m × n
  std::vector<int> h(static_cast<std::size_t>(m), 0);
  for (Eigen::Index j = 0; j < m; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
      if (c(j, i).real() > best) {
        best = c(j, i).real();
        h[static_cast<std::size_t>(j)] = static_cast<int>(i);
      }
  }
  return h;
}

// Depth-first enumeration of surjective maps. Returns false when the node budget runs out.
bool exhaustive_map(const GramData& g, double screen, std::vector<int>& out) {
  const int n = static_cast<int>(g.dd.size());
  const std::size_t m = static_cast<std::size_t>(g.pp.rows());
  std::vector<int> h(m, 0);
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  int empty = n;
  std::uint64_t nodes = 0;
  bool exhausted = false;
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (exhausted) return;
    if (++nodes > kNodeBudget) {
      exhausted = true;
      return;
    }
    if (j == m) {
      const double r = g.residual(h);
      if (r <= screen && r < best) {
        best = r;
        out = h;
      }
      return;
    }
    // Every still-empty group needs one of the remaining components.
    if (static_cast<std::size_t>(empty) > m - j) return;
    for (int i = 0; i < n; ++i) {
      h[j] = i;
      if (counts[static_cast<std::size_t>(i)]++ == 0) --empty;
      self(self, j + 1);
      if (--counts[static_cast<std::size_t>(i)] == 0) ++empty;
    }
  };
  rec(rec, 0);
  return !exhausted;
}

}  // namespace

std::string to_string(FinerStatus status) {
  switch (status) {
    case FinerStatus::found:
      return "found";
    case FinerStatus::absent:
      return "absent";
    case FinerStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double refinement_residual(const Decomposition& dp, const Decomposition& d, const std::vector<int>& h) {
  if (h.size() != dp.size()) throw InvalidArgument("refinement map has the wrong length");
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    WaveFunction group(d.grid(), d.parent().internal());
    bool used = false;
    for (std::size_t j = 0; j < h.size(); ++j)
      if (h[j] == static_cast<int>(i)) {
        group += dp[j];
        used = true;
      }
    if (!used) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, (d[i] - group).norm() / d[i].norm());
  }
  return worst;
}

FinerResult is_finer(const Decomposition& dp, const Decomposition& d, double tol) {
  if (!dp.parent().compatible(d.parent())) throw GridMismatch("decompositions live on different grids");
  FinerResult result;
  const double pn = d.parent().norm();
  const double mismatch = (dp.parent() - d.parent()).norm() / (pn > 0 ? pn : 1.0);
  if (mismatch > tol) {
    result.reason = "parent_mismatch";
    result.residual = mismatch;
    return result;
  }
  if (dp.size() < d.size()) {
    result.reason = "fewer components than the coarser decomposition";
    return result;
  }

  const GramData g(dp, d);
  // The Gram-based screen loses digits to cancellation; final acceptance re-sums on the grid.
  const double screen = std::max(tol, 1e-6);
  auto accept = [&](const std::vector<int>& h, const char* how) {
    if (g.residual(h) > screen) return false;
    const double r = refinement_residual(dp, d, h);
    if (r > tol) return false;
    result.status = FinerStatus::found;
    result.h = h;
    result.residual = r;
    result.reason = how;
    return true;
  };

  if (accept(greedy_map(g), "greedy")) return result;
  if (accept(least_squares_map(g), "least-squares")) return result;
  if (dp.size() > kExhaustiveLimit) {
    result.status = FinerStatus::inconclusive;
    result.reason = "heuristics failed and the finer decomposition is too large for exhaustive search";
    return result;
  }
  std::vector<int> h;
  const bool complete = exhaustive_map(g, screen, h);
  if (!h.empty() && accept(h, "exhaustive")) return result;
  if (!complete) {
    result.status = FinerStatus::inconclusive;
    result.reason = "exhaustive search budget exhausted";
    return result;
  }
  result.reason = "no surjective map reproduces the group sums";
  return result;
}

}  // namespace psd
