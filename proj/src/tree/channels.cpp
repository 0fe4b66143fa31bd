#include "psd/tree/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared distance to the nearest site along one line, lower envelope of parabolas
// (Felzenszwalb & Huttenlocher). `f` holds 0 at sites, +inf elsewhere, or a prior pass.
void distance_line(std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<std::size_t> v;
  std::vector<double> z;
  auto key = [&](std::size_t q) { return f[q] + (static_cast<double>(q) * h) * (static_cast<double>(q) * h); };
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s = -kInf;
    while (!v.empty()) {
      const std::size_t p = v.back();
      s = (key(q) - key(p)) / (2.0 * h * h * static_cast<double>(q - p));
      if (s > z.back()) break;
      v.pop_back();
      z.pop_back();
      s = -kInf;
    }
    v.push_back(q);
    z.push_back(v.size() == 1 ? -kInf : s);
  }
  if (v.empty()) return;
  z.push_back(kInf);
  std::size_t k = 0;
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    while (z[k + 1] < static_cast<double>(p)) ++k;
    const double d = (static_cast<double>(p) - static_cast<double>(v[k])) * h;
    out[p] = d * d + f[v[k]];
  }
  f = std::move(out);
}

// Exact Euclidean squared-distance field to the cells of `mask` (physical spacing).
std::vector<double> distance_field(const Grid& g, const std::vector<char>& mask) {
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.cells(1);
  std::vector<double> d(g.size());
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = mask[c] ? 0.0 : kInf;
  std::vector<double> line(n0);
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < n0; ++i) line[i] = d[i * n1 + j];
    distance_line(line, g.spacing(0));
    for (std::size_t i = 0; i < n0; ++i) d[i * n1 + j] = line[i];
  }
  if (g.dims() == 2) {
    line.resize(n1);
    for (std::size_t i = 0; i < n0; ++i) {
      std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(i * n1), n1, line.begin());
      distance_line(line, g.spacing(1));
      std::copy_n(line.begin(), n1, d.begin() + static_cast<std::ptrdiff_t>(i * n1));
    }
  }
  return d;
}

std::vector<int> label_components(const Grid& g, const std::vector<char>& mask, int& count) {
  std::vector<int> comp(g.size(), -1);
  count = 0;
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.cells(1);
  std::queue<std::size_t> q;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!mask[start] || comp[start] >= 0) continue;
    comp[start] = count;
    q.push(start);
    while (!q.empty()) {
      const std::size_t c = q.front();
      q.pop();
      const auto [i, j] = g.unravel(c);
      auto visit = [&](std::size_t nb) {
        if (mask[nb] && comp[nb] < 0) {
          comp[nb] = count;
          q.push(nb);
        }
      };
      if (i > 0) visit(c - n1);
      if (i + 1 < n0) visit(c + n1);
      if (j > 0) visit(c - 1);
      if (j + 1 < n1) visit(c + 1);
    }
    ++count;
  }
  return comp;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

// Nearest-group assignment for every cell given per-group distance fields.
std::vector<int> assign_nearest(const std::vector<std::vector<double>>& fields, std::size_t cells) {
  std::vector<int> labels(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    double best = kInf;
    for (std::size_t k = 0; k < fields.size(); ++k)
      if (fields[k][c] < best) {
        best = fields[k][c];
        labels[c] = static_cast<int>(k);
      }
  }
  return labels;
}

}  // namespace

Partition detect_channels(const WaveFunction& psi, const ChannelOptions& opt) {
  if (!(opt.theta > 0.0 && opt.theta < 1.0)) throw InvalidArgument("channel threshold must lie in (0, 1)");
  const Grid& g = psi.grid();
  const auto dens = psi.density();
  const double peak = *std::max_element(dens.begin(), dens.end());
  if (!(peak > 0.0)) throw InvalidArgument("no cell above threshold: the state is null");
  std::vector<char> mask(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) mask[c] = dens[c] >= opt.theta * peak;

  int count = 0;
  const auto comp = label_components(g, mask, count);
  std::vector<std::vector<double>> fields(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    std::vector<char> m(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) m[c] = comp[c] == k;
    fields[static_cast<std::size_t>(k)] = distance_field(g, m);
  }

  // Merge groups whose super-threshold cells come closer than d_min.
  UnionFind uf(count);
  const double dmin2 = opt.d_min * opt.d_min;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (comp[c] < 0) continue;
    for (int a = 0; a < count; ++a)
      if (a != comp[c] && fields[static_cast<std::size_t>(a)][c] < dmin2) uf.unite(a, comp[c]);
  }
  // Roots are the smallest member id, so ordering groups by root keeps first-cell order.
  std::vector<int> group_of(static_cast<std::size_t>(count));
  std::vector<std::vector<double>> gfields;
  std::vector<int> root_index(static_cast<std::size_t>(count), -1);
  for (int k = 0; k < count; ++k) {
    const int r = uf.find(k);
    if (root_index[static_cast<std::size_t>(r)] < 0) {
      root_index[static_cast<std::size_t>(r)] = static_cast<int>(gfields.size());
      gfields.push_back(fields[static_cast<std::size_t>(k)]);
    } else {
      auto& f = gfields[static_cast<std::size_t>(root_index[static_cast<std::size_t>(r)])];
      const auto& fk = fields[static_cast<std::size_t>(k)];
      for (std::size_t c = 0; c < f.size(); ++c) f[c] = std::min(f[c], fk[c]);
    }
    group_of[static_cast<std::size_t>(k)] = root_index[static_cast<std::size_t>(r)];
  }

  auto labels = assign_nearest(gfields, g.size());
  for (std::size_t c = 0; c < g.size(); ++c)
    if (comp[c] >= 0) labels[c] = group_of[static_cast<std::size_t>(comp[c])];

  // Fold channels below the mass floor into the nearest surviving channel.
  const double total = std::accumulate(dens.begin(), dens.end(), 0.0);
  std::vector<double> mass(gfields.size(), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) mass[static_cast<std::size_t>(labels[c])] += dens[c];
  std::vector<int> keep;
  for (std::size_t k = 0; k < mass.size(); ++k)
    if (mass[k] >= opt.mass_floor * total) keep.push_back(static_cast<int>(k));
  if (keep.empty()) keep.push_back(static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin()));
  if (keep.size() < gfields.size()) {
    std::vector<std::vector<double>> kept;
    std::vector<int> remap(gfields.size(), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
      remap[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
      kept.push_back(std::move(gfields[static_cast<std::size_t>(keep[k])]));
    }
    const auto nearest = assign_nearest(kept, g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      const int r = remap[static_cast<std::size_t>(labels[c])];
      labels[c] = r >= 0 ? r : nearest[c];
    }
    gfields = std::move(kept);
  }
  return Partition(g, std::move(labels), static_cast<int>(gfields.size()));
}

}  // namespace psd
