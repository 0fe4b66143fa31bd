#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"
#include "psd/tree/channels.hpp"
#include "psd/tree/permanence.hpp"
#include "psd/tree/tree.hpp"

using namespace psd;

namespace {

// w of two equal-norm free Gaussians whose centers are `s` apart, each of initial width σ.
double w_free_pair(double s, double sigma, double t, double m) {
  const double st = sigma * std::sqrt(1.0 + std::pow(t / (m * sigma * sigma), 2));
  return std::sqrt(std::erfc(std::abs(s) / (2.0 * st)));
}

WaveFunction pair_state(const Grid& g, double x, double k, double sigma) {
  return (gaussian_packet(g, -x, -k, sigma) + gaussian_packet(g, x, k, sigma)).normalized();
}

}  // namespace

TEST_CASE("channel detection") {
  const Grid g = Grid::line(1024, 256.0);
  const double sigma = 3.0;

  CHECK(detect_channels(gaussian_packet(g, 10.0, 1.0, sigma)).blocks() == 1);

  const auto far = pair_state(g, 5 * sigma, 0.0, sigma);
  const auto p = detect_channels(far, {0.01, 1.0, 1e-3});
  REQUIRE(p.blocks() == 2);
  // Boundary sits between the bumps, at the symmetric midpoint.
  for (std::size_t c = 0; c < g.size(); ++c) CHECK(p.label(c) == (g.center(0, c) < 0 ? 0 : 1));

  CHECK(detect_channels(pair_state(g, 0.5 * sigma, 0.0, sigma), {0.01, 1.0, 1e-3}).blocks() == 1);

  // Merging by distance.
  CHECK(detect_channels(far, {0.01, 40.0, 1e-3}).blocks() == 1);
  // Tiny side channel falls under the mass floor.
  const auto lopsided =
      (gaussian_packet(g, -30.0, 0.0, sigma) + Complex(0.02) * gaussian_packet(g, 30.0, 0.0, sigma)).normalized();
  CHECK(detect_channels(lopsided, {1e-4, 1.0, 1e-3}).blocks() == 1);
  CHECK(detect_channels(lopsided, {1e-4, 1.0, 1e-5}).blocks() == 2);

  CHECK_THROWS_AS(detect_channels(WaveFunction(g)), InvalidArgument);
  CHECK_THROWS_AS(detect_channels(far, {1.5, 1.0, 1e-3}), InvalidArgument);
}

TEST_CASE("channel detection is stable under axis relabeling") {
  const Grid g = Grid::plane({64, 32}, {64.0, 32.0});
  const Grid t = Grid::plane({32, 64}, {32.0, 64.0});
  const auto a = (gaussian_packet(g, {-15.0, 3.0}, {0, 0}, {3.0, 2.0}) +
                  gaussian_packet(g, {12.0, -4.0}, {0, 0}, {2.0, 3.0}) +
                  gaussian_packet(g, {0.0, 8.0}, {0, 0}, {2.5, 2.5}))
                     .normalized();
  WaveFunction b(t);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 32; ++j) b(t.index(j, i)) = a(g.index(i, j));
  const auto pa = detect_channels(a);
  const auto pb = detect_channels(b);
  REQUIRE(pa.blocks() == 3);
  REQUIRE(pb.blocks() == 3);
  // Same set partition up to a consistent permutation. Cells equidistant from two
  // channels are decided by channel id, so they may differ; verify those are true ties.
  std::vector<int> map(3, -1);
  const auto dens = a.density();
  const double peak = *std::max_element(dens.begin(), dens.end());
  auto nearest2 = [&](std::size_t c, int label) {
    double best = 1e300;
    const auto x = g.position(c);
    for (std::size_t q = 0; q < g.size(); ++q)
      if (dens[q] >= 0.01 * peak && pa.label(q) == label) {
        const auto y = g.position(q);
        best = std::min(best, (x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]));
      }
    return best;
  };
  for (std::size_t c = 0; c < g.size(); ++c)
    if (dens[c] >= 0.01 * peak) {
      const auto [i, j] = g.unravel(c);
      map[pa.label(c)] = pb.label(t.index(j, i));
    }
  int ties = 0;
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 32; ++j) {
      const std::size_t c = g.index(i, j);
      const int la = pa.label(c);
      const int lb = pb.label(t.index(j, i));
      if (map[la] == lb) continue;
      int other = 0;
      while (map[other] != lb) ++other;
      CHECK(nearest2(c, la) == doctest::Approx(nearest2(c, other)).epsilon(1e-12));
      ++ties;
    }
  CHECK(ties < 64);
}

TEST_CASE("permanence of free packet pairs") {
  const Grid g = Grid::line(1024, 256.0);
  const StaticDynamics dyn(EvolutionEngine::free(g, 1.0, 0.02));

  SUBCASE("receding") {
    // Spreading bounds the asymptotic ratio of separation to width by k·m·σ; keep it large.
    const double sigma = 4.0, x = 20.0, k = 2.0;
    const auto d = Decomposition::from_components({gaussian_packet(g, -x, -k, sigma), gaussian_packet(g, x, k, sigma)});
    // Stop before the fronts wrap around the periodic box.
    const auto rep = w_plus(d, dyn, 24.0, 2.0);
    CHECK(rep.horizon == doctest::Approx(24.0));
    CHECK(rep.times.size() == 13);
    CHECK(rep.values.front() == doctest::Approx(w_free_pair(2 * x, sigma, 0.0, 1.0)).epsilon(0.02));
    for (std::size_t i = 0; i < rep.times.size(); ++i)
      CHECK(rep.values[i] <= w_free_pair(2 * (x + k * rep.times[i]), sigma, rep.times[i], 1.0) + 1e-9);
    CHECK(rep.w_plus < 1e-5);
    CHECK(rep.worst_time == 0.0);
    CHECK(rep.w_plus == rep.values.front());
  }

  SUBCASE("approaching") {
    const double sigma = 2.0, x = 12.0, k = 1.5;
    const auto d = Decomposition::from_components({gaussian_packet(g, -x, k, sigma), gaussian_packet(g, x, -k, sigma)});
    const auto rep = w_plus(d, dyn, 16.0, 0.2);
    CHECK(rep.values.front() < 1e-3);
    CHECK(rep.w_plus > 0.98);
    CHECK(rep.worst_time == doctest::Approx(x / k).epsilon(0.03));
    // Mid-approach value against the free-spreading oracle.
    const double t = 4.0;
    CHECK(rep.values[20] == doctest::Approx(w_free_pair(2 * (x - k * t), sigma, t, 1.0)).epsilon(0.05));
  }
}

TEST_CASE("walls keep an exact spatial decomposition exact") {
  const Grid g = Grid::line(512, 128.0);
  EvolutionEngine e = EvolutionEngine::free(g, 1.0, 0.005);
  // Walls have a smooth edge: a sharp step on a spectral grid leaks through numerically.
  auto edge = [](double s) { return 0.5 * (1.0 + std::tanh(s)); };
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double x = g.center(0, c);
    e.potential[c] = 50.0 * (edge(3.0 - std::abs(x)) + edge(std::abs(x) - 56.0));
  }
  const StaticDynamics dyn(e);
  const auto psi = pair_state(g, 30.0, 1.0, 4.0);
  const auto d = decompose_by_partition(psi, Partition::split(g, 0, 0.0));
  CHECK(w_plus(d, dyn, 60.0, 5.0).w_plus < 1e-8);
}

TEST_CASE("psd partition check") {
  const Grid g = Grid::line(1024, 256.0);
  const StaticDynamics dyn(EvolutionEngine::free(g, 1.0, 0.02));

  const auto receding = pair_state(g, 15.0, 1.5, 2.0);
  const auto pass = check_psd_partition(Partition::split(g, 0, 0.0), receding, dyn, 20.0, 1.0, 0.05);
  CHECK(pass.passed);
  CHECK(pass.witnesses.size() == pass.times.size());

  const auto still = gaussian_packet(g, 0.0, 0.0, 2.0);
  const auto fail = check_psd_partition(Partition::split(g, 0, 0.0), still, dyn, 4.0, 0.2, 0.05);
  CHECK_FALSE(fail.passed);
  CHECK(fail.residuals.front() == 0.0);
  CHECK(fail.residuals[5] > 0.5);

  const auto trivial = check_psd_partition(Partition::single(g), still, dyn, 4.0, 1.0, 0.05);
  CHECK(trivial.passed);
  CHECK(trivial.worst_residual == 0.0);
}

TEST_CASE("tree of a free packet and verification") {
  const Grid g = Grid::line(512, 128.0);
  const StaticDynamics dyn(EvolutionEngine::free(g, 1.0, 0.02));
  const auto psi = gaussian_packet(g, -10.0, 1.0, 3.0);
  TreeOptions opt;
  opt.horizon = 20.0;
  opt.sample_dt = 1.0;
  const auto tree = build_tree(psi, dyn, opt);
  CHECK(tree.snapshots.size() == 1);
  CHECK(tree.branch_events.empty());
  CHECK(tree.series.size() == 21);
  const auto v = verify_tree(tree, psi, dyn, 0.05);
  CHECK(v.passed());
  CHECK(v.overlap.worst == 0.0);
  CHECK(to_json(tree)["nodes"].size() == 1);
  CHECK(tree_csv(tree).rfind("t,committed,detected,w\n", 0) == 0);
}

TEST_CASE("receding pair branches once") {
  const Grid g = Grid::line(1024, 256.0);
  const StaticDynamics dyn(EvolutionEngine::free(g, 1.0, 0.02));
  // Start overlapping, then separate.
  const auto psi = pair_state(g, 2.0, 1.5, 3.0);
  TreeOptions opt;
  opt.horizon = 40.0;
  opt.sample_dt = 1.0;
  const auto tree = build_tree(psi, dyn, opt);
  REQUIRE(tree.snapshots.size() == 2);
  CHECK(tree.branch_events.size() == 1);
  CHECK(tree.edges.front().h == std::vector<int>{0, 0});
  CHECK(tree.snapshots[1].w_value <= 0.05);
  const auto v = verify_tree(tree, psi, dyn, 0.05);
  CHECK(v.sum.passed);
  CHECK(v.refinement.passed);
  CHECK(v.overlap.passed);

  SUBCASE("a merged-channel edit breaks refinement") {
    TreeStructure edited = tree;
    edited.snapshots.push_back(ChannelSnapshot{
        30.0, Decomposition::from_components({tree.snapshots[0].decomposition[0]}), Partition::single(g), 0.0});
    CHECK_FALSE(verify_tree(edited, psi, dyn, 0.05).refinement.passed);
  }
}
