#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "psd/core/dynamics.hpp"
#include "psd/core/errors.hpp"
#include "psd/core/evolution.hpp"
#include "psd/core/packets.hpp"

using namespace psd;

namespace {

// Closed-form free Gaussian, amplitude convention exp(−(x−x₀)²/(2σ²)) at t = 0.
Complex free_gaussian(double x, double t, double x0, double k, double sigma, double m) {
  const Complex tau(1.0, t / (m * sigma * sigma));
  const double xc = x - x0 - k * t / m;
  const Complex i(0.0, 1.0);
  const Complex amp = std::pow(std::numbers::pi * sigma * sigma, -0.25) / std::sqrt(tau);
  return amp * std::exp(-xc * xc / (2.0 * sigma * sigma * tau) + i * k * (x - x0) - i * k * k * t / (2.0 * m));
}

}  // namespace

TEST_CASE("free packet follows the closed form") {
  const Grid g = Grid::line(1024, 256.0);
  const double x0 = -40, k = 1.2, sigma = 4.0, m = 1.5;
  const auto psi = gaussian_packet(g, x0, k, sigma);
  const auto out = evolve(psi, EvolutionEngine::free(g, m, 0.01), 30.0);
  CHECK(out.steps == 3000);
  CHECK(out.elapsed == doctest::Approx(30.0));
  double err = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    err = std::max(err, std::abs(out.state(c) - free_gaussian(g.center(0, c), out.elapsed, x0, k, sigma, m)));
  CHECK(err < 1e-10);
  CHECK(mean_position(out.state, 0) == doctest::Approx(x0 + k * 30.0 / m).epsilon(1e-8));
}

TEST_CASE("zero time is the identity") {
  const Grid g = Grid::line(128, 64.0);
  const auto psi = gaussian_packet(g, 0.0, 0.5, 3.0);
  const auto out = evolve(psi, EvolutionEngine::free(g, 1.0, 0.1), 0.05);
  CHECK(out.steps == 0);
  CHECK(out.elapsed == 0.0);
  CHECK(out.state == psi);
}

TEST_CASE("harmonic ground state is stationary") {
  const Grid g = Grid::line(256, 32.0);
  const double m = 1.0, omega = 1.0;
  EvolutionEngine e = EvolutionEngine::free(g, m, 1e-3);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double x = g.center(0, c);
    e.potential[c] = 0.5 * m * omega * omega * x * x;
  }
  const auto psi = gaussian_packet(g, 0.0, 0.0, 1.0 / std::sqrt(m * omega));
  const auto out = evolve(psi, e, 2.0 * std::numbers::pi / omega);
  double dev = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) dev = std::max(dev, std::abs(std::abs(out.state(c)) - std::abs(psi(c))));
  CHECK(dev < 1e-6);
}

TEST_CASE("unitarity over a thousand steps") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Grid g = trial == 2 ? Grid::plane({32, 16}, {20.0, 10.0}) : Grid::line(256, 40.0);
    EvolutionEngine e = EvolutionEngine::free(g, {0.5 + u(rng), 0.5 + u(rng)}, 0.01 + 0.02 * u(rng));
    for (auto& v : e.potential) v = 5.0 * u(rng);
    WaveFunction a(g), b(g);
    for (auto& z : a.amplitudes()) z = {n(rng), n(rng)};
    for (auto& z : b.amplitudes()) z = {n(rng), n(rng)};
    a = a.normalized();
    b = b.normalized();
    const auto ea = evolve(a, e, 1000 * e.dt);
    const auto eb = evolve(b, e, 1000 * e.dt);
    CHECK(ea.steps == 1000);
    CHECK(std::abs(ea.state.norm() - 1.0) < 1e-8);
    CHECK(std::abs(inner(ea.state, eb.state) - inner(a, b)) < 1e-8);
  }
}

TEST_CASE("momentum moments") {
  const Grid g = Grid::line(1024, 256.0);
  const double k = 2.0, sigma = 6.0;
  const auto plus = gaussian_packet(g, 0.0, k, sigma);
  const auto minus = gaussian_packet(g, 0.0, -k, sigma);
  const double dk = 2 * std::numbers::pi / g.extent(0);
  CHECK(std::abs(mean_momentum(plus, 0) - k) < dk);
  // Amplitude overlap of ±k packets in this convention is exp(−k²σ²).
  CHECK(std::abs(inner(plus, minus)) < 1e-12);
  const auto slow = gaussian_packet(g, 0.0, 0.1, sigma);
  const auto slow_m = gaussian_packet(g, 0.0, -0.1, sigma);
  CHECK(std::abs(inner(slow, slow_m)) == doctest::Approx(std::exp(-0.01 * sigma * sigma)).epsilon(1e-9));
}

TEST_CASE("spectral translation") {
  const Grid g = Grid::plane({64, 64}, {64.0, 64.0});
  const auto psi = gaussian_packet(g, {-16.0, 0.0}, {0.0, 0.0}, {2.0, 3.0});
  WaveFunction moved = psi;
  translate(moved, 1, [](std::size_t line, std::size_t) { return line < 32 ? 5.0 : -5.0; });
  CHECK(mean_position(moved, 1) == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(moved.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto expected = gaussian_packet(g, {-16.0, 5.0}, {0.0, 0.0}, {2.0, 3.0});
  CHECK((moved - expected).norm() < 1e-10);
}

TEST_CASE("staged dynamics switches engines") {
  const Grid g = Grid::line(512, 128.0);
  const auto psi = gaussian_packet(g, -20.0, 1.0, 4.0);
  EvolutionEngine a = EvolutionEngine::free(g, 1.0, 0.01);
  Stage s0{0.0, a, std::nullopt};
  Stage s1{5.0, a, Stage::Drift{0, [](std::size_t, std::size_t) { return 2.0; }}};
  StagedDynamics dyn({s0, s1});
  std::vector<WaveFunction> v{psi};
  dyn.advance(v, 0.0, 1000);
  // Free motion for 10 units plus a drift of 2 for the last 5.
  CHECK(mean_position(v[0], 0) == doctest::Approx(-20.0 + 10.0 + 10.0).epsilon(1e-8));

  CHECK_THROWS_AS(StagedDynamics({s1}), InvalidArgument);
}

TEST_CASE("overflow aborts") {
  const Grid g = Grid::line(64, 16.0);
  WaveFunction psi(g);
  psi(3) = {std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(evolve(psi, EvolutionEngine::free(g, 1.0, 0.1), 1.0), NumericalAbort);
}
