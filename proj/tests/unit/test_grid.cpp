#include <doctest.h>

#include <cmath>
#include <random>

#include "psd/core/errors.hpp"
#include "psd/core/packets.hpp"
#include "psd/core/region.hpp"

using namespace psd;

namespace {

WaveFunction random_state(const Grid& g, std::mt19937_64& rng, std::size_t internal = 1) {
  std::normal_distribution<double> n;
  WaveFunction psi(g, internal);
  for (auto& a : psi.amplitudes()) a = {n(rng), n(rng)};
  return psi.normalized();
}

// Trapezoid rule on a fine independent mesh.
double overlap_quadrature(double c1, double c2, double sigma) {
  const double lo = std::min(c1, c2) - 12 * sigma;
  const double hi = std::max(c1, c2) + 12 * sigma;
  const int n = 200000;
  const double h = (hi - lo) / n;
  double s12 = 0, s11 = 0, s22 = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double g1 = std::exp(-(x - c1) * (x - c1) / (2 * sigma * sigma));
    const double g2 = std::exp(-(x - c2) * (x - c2) / (2 * sigma * sigma));
    s12 += w * g1 * g2;
    s11 += w * g1 * g1;
    s22 += w * g2 * g2;
  }
  return s12 / std::sqrt(s11 * s22);
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g = Grid::plane({8, 4}, {16.0, 2.0});
  CHECK(g.size() == 32);
  CHECK(g.spacing(0) == doctest::Approx(2.0));
  CHECK(g.cell_volume() == doctest::Approx(1.0));
  CHECK(g.center(0, 0) == doctest::Approx(-7.0));
  CHECK(g.index(3, 2) == 14);
  CHECK(g.unravel(14) == std::array<std::size_t, 2>{3, 2});
  CHECK_THROWS_AS(Grid::line(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid::line(4, -1.0), InvalidArgument);
}

TEST_CASE("inner product") {
  std::mt19937_64 rng(7);
  const Grid g = Grid::line(64, 10.0);
  const auto a = random_state(g, rng);
  const auto b = random_state(g, rng);
  CHECK(std::abs(inner(a, a) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-14);
  CHECK_THROWS_AS(inner(a, WaveFunction(Grid::line(32, 10.0))), GridMismatch);

  SUBCASE("disjoint supports") {
    const auto left = project(a, Region::where(g, [](double x, double) { return x < 0; }));
    const auto right = project(b, Region::where(g, [](double x, double) { return x >= 0; }));
    CHECK(inner(left, right) == Complex(0.0, 0.0));
  }

  SUBCASE("gaussians four widths apart") {
    const double sigma = 2.0;
    const Grid fine = Grid::line(2048, 128.0);
    const auto p = gaussian_packet(fine, 0.0, 0.0, sigma);
    const auto q = gaussian_packet(fine, 4 * sigma, 0.0, sigma);
    const Complex v = inner(p, q);
    CHECK(v.real() == doctest::Approx(overlap_quadrature(0.0, 4 * sigma, sigma)).epsilon(1e-9));
    CHECK(v.real() == doctest::Approx(std::exp(-4.0)).epsilon(1e-9));
    CHECK(std::abs(v.imag()) < 1e-14);
  }
}

TEST_CASE("projection-valued measure") {
  std::mt19937_64 rng(11);
  const Grid g = Grid::plane({16, 8}, {4.0, 2.0});
  const auto psi = random_state(g, rng, 2);

  CHECK(project(psi, Region::all(g)) == psi);
  CHECK(project(psi, Region::none(g)).norm() == 0.0);

  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<int> labels(g.size());
  for (auto& l : labels) l = pick(rng);
  const Partition part(g, labels, 4);

  WaveFunction sum(g, 2);
  for (int b = 0; b < 4; ++b) {
    const auto pb = project(psi, part.block(b));
    CHECK(project(pb, part.block(b)) == pb);
    sum += pb;
    for (int c = b + 1; c < 4; ++c) CHECK(inner(pb, project(psi, part.block(c))) == Complex(0.0, 0.0));
  }
  CHECK(sum == psi);

  const Region r = part.block(1);
  CHECK(project(psi, r) + project(psi, r.complement()) == psi);

  SUBCASE("support containment") {
    const Grid line = Grid::line(64, 32.0);
    const auto left = gaussian_packet(line, -8.0, 0.0, 1.0);
    const Region half = Region::where(line, [](double x, double) { return x < 0; });
    const auto p = project(left, half);
    CHECK((p - left).norm() < 1e-12);
  }
}

TEST_CASE("partition invariants") {
  const Grid g = Grid::line(4, 4.0);
  CHECK_THROWS_AS(Partition(g, {0, 0, 2, 2}, 3), InvalidArgument);
  CHECK_THROWS_AS(Partition(g, {0, 0, 1}, 2), InvalidArgument);
  CHECK_THROWS_AS(Partition(g, {0, 0, 5, 1}, 2), InvalidArgument);
  const auto w = Partition::witness(g, {0, 0, 0, 0}, 2);
  CHECK(w.has_empty_blocks());
  CHECK(Partition::split(g, 0, 0.0).labels() == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("gaussian packet") {
  const Grid g = Grid::line(1024, 200.0);
  const auto psi = gaussian_packet(g, 10.3, 1.5, 4.0);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(mean_position(psi, 0) - 10.3) <= 0.5 * g.spacing(0));
  CHECK_THROWS_AS(gaussian_packet(g, 0.0, 0.0, 0.3), InvalidArgument);

  const Grid p = Grid::plane({64, 64}, {64.0, 32.0});
  const auto q = gaussian_packet(p, {3.0, -2.0}, {0.0, 0.0}, {4.0, 2.0});
  CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean_position(q, 1) == doctest::Approx(-2.0).epsilon(1e-6));
}
