#include "psd/decomposition/overlap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "psd/core/errors.hpp"
#include "psd/core/serialize.hpp"

namespace psd {
namespace {

constexpr std::size_t kTableLimit = std::size_t{1} << 27;

// Per-cell densities |Ψ_I(x)|² for every subset I, plus subset norms.
//
// A cell labeled l contributes to the residual of subset I either |Ψ_{Iᶜ}(x)|²
// (l ∈ I: the projection keeps the whole Ψ there) or |Ψ_I(x)|² (l ∉ I).
class SubsetTable {
 public:
  explicit SubsetTable(const Decomposition& d)
      : n_(d.size()), masks_(std::size_t{1} << n_), full_(static_cast<std::uint32_t>(masks_ - 1)) {
    const Grid& g = d.grid();
    if (n_ > 20 || g.size() * masks_ > kTableLimit)
      throw InvalidArgument("decomposition too large for subset enumeration");
    const std::size_t internal = d.parent().internal();
    dens_.assign(g.size() * masks_, 0.0);
    norms_.assign(masks_, 0.0);
    std::vector<Complex> sums(masks_ * internal);
    for (std::size_t c = 0; c < g.size(); ++c) {
      std::fill(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(internal), Complex{});
      bool any = false;
      for (std::size_t m = 1; m < masks_; ++m) {
        // Ψ_m = Ψ_{m without its lowest bit} + Ψ_low.
        const auto low = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint32_t>(m)));
        const std::size_t rest = m & (m - 1);
        double dsum = 0.0;
        for (std::size_t s = 0; s < internal; ++s) {
          const Complex v = sums[rest * internal + s] + d[low](c, s);
          sums[m * internal + s] = v;
          dsum += std::norm(v);
        }
        dens_[c * masks_ + m] = dsum;
        norms_[m] += dsum;
        any = any || dsum > 0.0;
      }
      if (any) active_.push_back(c);
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t masks() const noexcept { return masks_; }
  std::uint32_t full() const noexcept { return full_; }
  const std::vector<std::size_t>& active() const noexcept { return active_; }
  double norm(std::size_t m) const noexcept { return norms_[m]; }

  double contribution(std::size_t c, int label, std::size_t m) const noexcept {
    const bool in = (m >> label) & 1u;
    return dens_[c * masks_ + (in ? (full_ ^ m) : m)];
  }

  double density(std::size_t c, std::size_t m) const noexcept { return dens_[c * masks_ + m]; }

  // Residual sums N_I for a labeling (no cell-volume factor).
  std::vector<double> residuals(const std::vector<int>& labels) const {
    std::vector<double> r(masks_, 0.0);
    for (std::size_t c : active_)
      for (std::size_t m = 1; m < full_; ++m) r[m] += contribution(c, labels[c], m);
    return r;
  }

  double ratio_sq(const std::vector<double>& r, std::size_t m) const noexcept {
    if (norms_[m] > 0.0) return r[m] / norms_[m];
    return r[m] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }

  SubsetScore score(const std::vector<double>& r, bool singletons_only = false) const {
    SubsetScore s;
    double best = -1.0;
    for (std::size_t m = 1; m < full_; ++m) {
      if (singletons_only && (m & (m - 1)) != 0) continue;
      const double v = ratio_sq(r, m);
      if (v > best) {
        best = v;
        s.argmax = static_cast<std::uint32_t>(m);
      }
    }
    s.value = best > 0.0 ? std::sqrt(best) : 0.0;
    return s;
  }

 private:
  std::size_t n_;
  std::size_t masks_;
  std::uint32_t full_;
  std::vector<double> dens_;
  std::vector<double> norms_;
  std::vector<std::size_t> active_;
};

void check_blocks(const Decomposition& d, const Partition& part) {
  if (!(part.grid() == d.grid())) throw GridMismatch("partition and decomposition live on different grids");
  if (static_cast<std::size_t>(part.blocks()) != d.size())
    throw InvalidArgument("partition block count does not match the number of components");
}

struct SearchState {
  std::vector<int> labels;
  std::vector<double> r;
  double max = 0.0;
  double sum = 0.0;
};

void refresh(const SubsetTable& t, SearchState& s) {
  s.r = t.residuals(s.labels);
  s.max = 0.0;
  s.sum = 0.0;
  for (std::size_t m = 1; m < t.full(); ++m) {
    const double v = t.ratio_sq(s.r, m);
    s.max = std::max(s.max, v);
    s.sum += v;
  }
}

// First-improvement single-cell relabeling. Primary objective is the largest
// squared ratio, secondary the sum of squared ratios; no move raises the max.
void local_search(const SubsetTable& t, SearchState& s, int budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order = t.active();
  const int n = static_cast<int>(t.n());
  std::vector<double> trial(t.masks());
  for (int sweep = 0; sweep < budget; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    for (std::size_t c : order) {
      const int from = s.labels[c];
      for (int to = 0; to < n; ++to) {
        if (to == from) continue;
        double mx = 0.0;
        double sm = 0.0;
        for (std::size_t m = 1; m < t.full(); ++m) {
          trial[m] = s.r[m] - t.contribution(c, from, m) + t.contribution(c, to, m);
          const double v = t.ratio_sq(trial, m);
          mx = std::max(mx, v);
          sm += v;
        }
        const double eps = 1e-13 * std::max(1.0, s.max);
        const bool better = mx < s.max - eps || (mx <= s.max + eps && sm < s.sum - 1e-13 * std::max(1.0, s.sum));
        if (!better) continue;
        s.labels[c] = to;
        std::swap(s.r, trial);
        s.max = mx;
        s.sum = sm;
        improved = true;
        break;
      }
    }
    refresh(t, s);  // discard accumulated round-off
    if (!improved) break;
  }
}

// Exhaustive labeling search with a partial-max lower bound (contributions are non-negative).
void branch_and_bound(const SubsetTable& t, std::size_t cells, SearchState& best) {
  const int n = static_cast<int>(t.n());
  std::vector<int> labels(cells, 0);
  std::vector<std::vector<double>> partial(cells + 1, std::vector<double>(t.masks(), 0.0));
  auto bound = [&](const std::vector<double>& r) {
    double mx = 0.0;
    for (std::size_t m = 1; m < t.full(); ++m) mx = std::max(mx, t.ratio_sq(r, m));
    return mx;
  };
  auto rec = [&](auto&& self, std::size_t c) -> void {
    if (c == cells) {
      const double mx = bound(partial[c]);
      if (mx < best.max) {
        best.labels = labels;
        best.max = mx;
      }
      return;
    }
    for (int l = 0; l < n; ++l) {
      labels[c] = l;
      for (std::size_t m = 1; m < t.full(); ++m) partial[c + 1][m] = partial[c][m] + t.contribution(c, l, m);
      if (bound(partial[c + 1]) >= best.max) continue;
      self(self, c + 1);
    }
  };
  rec(rec, 0);
}

}  // namespace

std::string to_string(WMode mode) {
  switch (mode) {
    case WMode::exact_pair:
      return "exact-pair";
    case WMode::brute_force:
      return "brute-force";
    case WMode::heuristic_upper_bound:
      return "heuristic-upper-bound";
  }
  return "unknown";
}

SubsetScore w_given_partition(const Decomposition& d, const Partition& part) {
  check_blocks(d, part);
  if (d.size() == 1) return {};
  const SubsetTable t(d);
  return t.score(t.residuals(part.labels()));
}

SubsetScore w_singletons_given_partition(const Decomposition& d, const Partition& part) {
  check_blocks(d, part);
  if (d.size() == 1) return {};
  const SubsetTable t(d);
  return t.score(t.residuals(part.labels()), true);
}

Partition argmax_partition(const Decomposition& d) {
  const Grid& g = d.grid();
  std::vector<int> labels(g.size(), 0);
  for (std::size_t c = 0; c < g.size(); ++c) {
    double best = d[0].cell_density(c);
    for (std::size_t i = 1; i < d.size(); ++i) {
      const double v = d[i].cell_density(c);
      if (v > best) {
        best = v;
        labels[c] = static_cast<int>(i);
      }
    }
  }
  return Partition::witness(g, std::move(labels), static_cast<int>(d.size()));
}

WReport w_exact_pair(const Decomposition& d) {
  if (d.size() != 2) throw InvalidArgument("the pair closed form needs exactly two components");
  const Grid& g = d.grid();
  double overlap = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) overlap += std::min(d[0].cell_density(c), d[1].cell_density(c));
  overlap *= g.cell_volume();
  const double denom = std::min(d[0].norm(), d[1].norm());
  if (!(denom > 0.0)) throw InvalidArgument("the pair closed form needs non-zero components");
  Partition part = argmax_partition(d);
  const SubsetScore s = w_given_partition(d, part);
  return WReport{std::sqrt(overlap) / denom, std::move(part), WMode::exact_pair, s.argmax, WOptions{}};
}

WReport w_optimize(const Decomposition& d, const WOptions& options) {
  if (options.budget <= 0) throw InvalidArgument("w_optimize budget must be positive");
  const std::size_t n = d.size();
  if (n == 1) return WReport{0.0, Partition::single(d.grid()), WMode::brute_force, 0, options};
  if (n == 2 && !options.force_local_search) {
    WReport r = w_exact_pair(d);
    r.options = options;
    return r;
  }
  const SubsetTable t(d);
  const Partition seed = argmax_partition(d);
  SearchState s;
  s.labels = seed.labels();
  refresh(t, s);
  const double seed_max = s.max;
  WMode mode = WMode::heuristic_upper_bound;
  const std::size_t cells = d.grid().size();
  if (options.allow_brute_force && !options.force_local_search && cells <= 16 && n <= 3) {
    branch_and_bound(t, cells, s);
    mode = WMode::brute_force;
  } else {
    local_search(t, s, options.budget, options.seed);
  }
  refresh(t, s);
  if (s.max > seed_max) {
    s.labels = seed.labels();
    refresh(t, s);
  }
  Partition part = Partition::witness(d.grid(), s.labels, static_cast<int>(n));
  const SubsetScore score = t.score(s.r);
  return WReport{score.value, std::move(part), mode, score.argmax, options};
}

nlohmann::json to_json(const WReport& r) {
  nlohmann::json j;
  j["value"] = r.value;
  j["mode"] = to_string(r.mode);
  j["blocks"] = r.partition.blocks();
  j["labels_rle"] = rle_labels(r.partition.labels());
  std::vector<int> subset;
  for (int i = 0; i < 32; ++i)
    if (r.subset_argmax & (1u << i)) subset.push_back(i);
  j["subset_argmax"] = subset;
  j["options"] = {{"budget", r.options.budget},
                  {"allow_brute_force", r.options.allow_brute_force},
                  {"force_local_search", r.options.force_local_search},
                  {"seed", r.options.seed},
                  {"tolerances",
                   {{"sum", r.options.tolerances.sum},
                    {"gram", r.options.tolerances.gram},
                    {"min_norm", r.options.tolerances.min_norm}}}};
  return j;
}

}  // namespace psd
