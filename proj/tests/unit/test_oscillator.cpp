#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "psd/core/errors.hpp"
#include "psd/oscillator/oscillator.hpp"

using namespace psd;

namespace {

constexpr Complex I{0.0, 1.0};

// |⟨n|α⟩|² by logs, independent of the recursive construction
double poisson(double mean, int n) { return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0)); }

double max_entry(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Fock space ladder operators") {
  const FockSpace s(10);
  for (int n = 0; n < 10; ++n) CHECK(s.number(n, n).real() == doctest::Approx(n));
  const CMatrix comm = s.a * s.adag - s.adag * s.a;
  CHECK(max_entry(comm.topLeftCorner(9, 9) - CMatrix::Identity(9, 9)) < 1e-12);
  // the truncation shows up only in the top level
  CHECK(comm(9, 9).real() == doctest::Approx(-9.0));
  CHECK_THROWS_AS(FockSpace(1), InvalidArgument);
}

TEST_CASE("coherent states") {
  const FockSpace s(40);
  CHECK(max_entry(coherent_state(0.0, s) - CVector::Unit(40, 0)) == 0.0);
  for (const Complex alpha : {Complex(0.3, 0.0), Complex(1.0, -1.0), Complex(0.0, 2.0), Complex(-1.2, 1.6)}) {
    const CVector v = coherent_state(alpha, s);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((s.a * v - alpha * v).norm() <= 1e-6);
    double mean = 0.0;
    for (int n = 1; n < 40; ++n) mean += n * poisson(std::norm(alpha), n);
    CHECK(std::abs((v.adjoint() * s.number * v)(0, 0).real() - mean) <= 1e-6);
    CHECK(std::abs(mean - std::norm(alpha)) <= 1e-6);
  }
  CHECK_THROWS_AS(coherent_state(Complex(3.2, 0.0), s), InvalidArgument);
}

TEST_CASE("coherent overlap against the Fock expansion") {
  const FockSpace s(40);
  CHECK(coherent_overlap(Complex(0.7, -0.2), Complex(0.7, -0.2)) == Complex(1.0));
  CHECK(std::abs(coherent_overlap(1.0, 0.0) - std::exp(-0.5)) < 1e-15);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rad(0.0, 2.0), ang(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const Complex a = std::polar(rad(rng), ang(rng));
    const Complex b = std::polar(rad(rng), ang(rng));
    const Complex fock = (coherent_state(a, s).adjoint() * coherent_state(b, s))(0, 0);
    CHECK(std::abs(coherent_overlap(a, b) - fock) <= 1e-8);
    CHECK(std::abs(coherent_overlap(a, b)) == doctest::Approx(std::exp(-0.5 * std::norm(a - b))).epsilon(1e-12));
  }
}

TEST_CASE("completeness of coherent states") {
  const FockSpace s(40);
  const double R = std::sqrt(40.0);
  const auto rep = completeness_check(s, R, 40000);
  CHECK(rep.sector == 10);
  CHECK(std::abs(rep.matrix(0, 0).real() - (1.0 - std::exp(-R * R))) <= 0.02);
  CHECK(std::abs(rep.matrix(0, 1)) <= 1e-3);
  CHECK(std::abs(rep.matrix(10, 10).real() - boost::math::gamma_p(11.0, R * R)) <= 1e-3);
  CHECK(std::abs(rep.matrix(10, 10).real() - 1.0) <= 0.05);
  CHECK(rep.max_deviation < 0.05);

  // a smaller disc cuts into the higher levels exactly as the incomplete gamma says
  const auto small = completeness_check(s, 3.0, 10000);
  CHECK(small.sector == 2);
  for (int n = 0; n <= 2; ++n)
    CHECK(small.matrix(n, n).real() == doctest::Approx(boost::math::gamma_p(n + 1.0, 9.0)).epsilon(1e-3));

  CHECK_THROWS_AS(completeness_check(s, 7.0, 40000), InvalidArgument);
  CHECK_THROWS_AS(completeness_check(s, R, 100), InvalidArgument);
}

TEST_CASE("Lindblad integration") {
  const FockSpace s(40);
  const LindbladParams p{1.0, 1.0};

  SUBCASE("vacuum is a fixed point") {
    const OscillatorDensityMatrix vac{coherent_projector(0.0, 0.0, s).entries, 0.0};
    const auto out = lindblad_evolve(vac, p, 2.0, 0.01);
    CHECK(max_entry(out.entries - vac.entries) < 1e-14);
    CHECK(out.time == doctest::Approx(2.0));
  }

  SUBCASE("coherent states stay pure") {
    const Complex alpha(1.5, 1.0);
    for (const double t : {0.5, 1.5, 3.0}) {
      LindbladDiagnostics d;
      const auto out = lindblad_evolve(coherent_projector(alpha, alpha, s), p, t, 0.01, &d);
      const CVector at = coherent_state(damped_amplitude(alpha, p, t), s);
      CHECK(max_entry(out.entries - at * at.adjoint()) <= 1e-6);
      CHECK(d.trace_drift <= 1e-8);
      CHECK(d.symmetrized);
      CHECK(out.hermiticity_error() <= 1e-10);
      CHECK(out.min_eigenvalue() >= -1e-8);
      CHECK(out.mean_number() == doctest::Approx(std::norm(alpha) * std::exp(-t)).epsilon(1e-6));
    }
  }

  SUBCASE("off-diagonal seeds follow the analytic solution") {
    const Complex alpha(2.0, 0.0), beta(0.0, 1.0);
    for (const double t : {0.5, 1.5, 3.0}) {
      LindbladDiagnostics d;
      const auto num = lindblad_evolve(coherent_projector(alpha, beta, s), p, t, 0.01, &d);
      CHECK_FALSE(d.symmetrized);
      CHECK(max_entry(num.entries - analytic_solution(alpha, beta, p, t, s).entries) <= 1e-6);
    }
  }

  SUBCASE("analytic solution limits") {
    const Complex alpha(0.6, 0.2), beta(-0.4, 0.5);
    CHECK(max_entry(analytic_solution(alpha, beta, p, 0.0, s).entries - coherent_projector(alpha, beta, s).entries) ==
          0.0);
    const Complex bra_ket = coherent_overlap(beta, alpha);  // ⟨β|α⟩
    CHECK(std::abs(decoherence_factor(alpha, beta, p, 20.0) - bra_ket) < 1e-8);
    const auto late = analytic_solution(alpha, beta, p, 20.0, s);
    CHECK(std::abs(late.entries(0, 0) - bra_ket) < 1e-8);
    CHECK(std::abs(late.entries.trace() - late.entries(0, 0)) < 1e-8);
    // exponent 1/2 at γt = ln 2
    const double t = std::log(2.0);
    CHECK(std::abs(decoherence_factor(alpha, beta, p, t) - std::sqrt(bra_ket)) < 1e-12);
    const auto num = lindblad_evolve(coherent_projector(alpha, beta, s), p, t, 0.01);
    CHECK(max_entry(num.entries - analytic_solution(alpha, beta, p, t, s).entries) <= 1e-6);
  }

  SUBCASE("linearity") {
    const auto r1 = coherent_projector(Complex(1.0, 0.5), Complex(1.0, 0.5), s);
    const auto r2 = coherent_projector(Complex(-0.5, 0.0), Complex(0.0, 1.0), s);
    const Complex c(0.3, -0.7);
    const OscillatorDensityMatrix mix{c * r1.entries + r2.entries, 0.0};
    const auto lhs = lindblad_evolve(mix, p, 1.0, 0.01);
    const auto rhs = c * lindblad_evolve(r1, p, 1.0, 0.01).entries + lindblad_evolve(r2, p, 1.0, 0.01).entries;
    CHECK(max_entry(lhs.entries - rhs) < 1e-12);
  }

  SUBCASE("errors") {
    const auto rho = coherent_projector(1.0, 1.0, s);
    CHECK_THROWS_AS(lindblad_evolve(rho, p, 1.0, 0.02), InvalidArgument);
    CHECK_THROWS_AS(lindblad_evolve(rho, {1.0, 0.0}, 1.0, 0.01), InvalidArgument);
    CHECK_THROWS_AS(lindblad_evolve(rho, p, -1.0, 0.01), InvalidArgument);
    const FockSpace tiny(12);
    CHECK_THROWS_AS(lindblad_evolve(coherent_projector(std::sqrt(3.0), std::sqrt(3.0), tiny), p, 0.1, 0.01),
                    NumericalAbort);
  }
}

TEST_CASE("decoherence of a superposition of coherent states") {
  const FockSpace s(40);
  const LindbladParams p{1.0, 1.0};
  const Complex alpha = 2.0, beta = -2.0;
  const double c = 1.0 / std::sqrt(2.0 * (1.0 + coherent_overlap(alpha, beta).real()));

  const auto late = superposition_decoherence(c, alpha, c, beta, p, 3.0, s);
  CHECK(std::abs(late.f) == doctest::Approx(std::pow(std::exp(-8.0), 1.0 - std::exp(-3.0))).epsilon(1e-10));
  const CVector at = coherent_state(damped_amplitude(alpha, p, 3.0), s);
  const CVector bt = coherent_state(damped_amplitude(beta, p, 3.0), s);
  const CMatrix unit_cross = c * c * (at * bt.adjoint() + bt * at.adjoint());
  CHECK(std::abs(late.coherence - std::abs(late.f) * trace_norm(unit_cross)) <= 1e-6);
  CHECK(late.rho.entries.trace().real() == doctest::Approx(1.0).epsilon(1e-10));

  // against direct integration of |S⟩⟨S|
  const CVector S = c * (coherent_state(alpha, s) + coherent_state(beta, s));
  const auto num = lindblad_evolve({S * S.adjoint(), 0.0}, p, 3.0, 0.01);
  CHECK(max_entry(num.entries - late.rho.entries) <= 1e-6);

  // interference dies long before the energy does
  const auto start = superposition_decoherence(c, alpha, c, beta, p, 0.0, s);
  const auto early = superposition_decoherence(c, alpha, c, beta, p, 0.1, s);
  const double energy_ratio = early.rho.mean_number() / start.rho.mean_number();
  CHECK(energy_ratio == doctest::Approx(std::exp(-0.1)).epsilon(1e-6));
  CHECK(std::abs(early.f) == doctest::Approx(std::exp(-8.0 * (1.0 - std::exp(-0.1)))).epsilon(1e-10));
  CHECK(early.coherence / start.coherence < 0.5);
  CHECK(1.0 - energy_ratio < 0.1);

  CHECK_THROWS_AS(superposition_decoherence(c, alpha, c, alpha, p, 1.0, s), InvalidArgument);
  CHECK_THROWS_AS(superposition_decoherence(1.0, alpha, 1.0, beta, p, 1.0, s), InvalidArgument);
}

TEST_CASE("ideal decoherence model") {
  IdealModelConfig cfg;
  cfg.system_dim = 2;
  cfg.qubits = 20;
  cfg.kappa_dt = std::numbers::pi / 4.0 / 100.0;
  const std::vector<Complex> c{std::sqrt(0.3), std::sqrt(0.7) * std::exp(I * 0.4)};

  const auto t0 = ideal_model_evolve(cfg, c, 0);
  CHECK(max_entry(t0.env_overlap - CMatrix::Ones(2, 2)) < 1e-15);
  const CVector s{{c[0], c[1]}};
  CHECK(max_entry(t0.reduced - s * s.adjoint()) < 1e-15);

  const auto out = ideal_model_evolve(cfg, c, 100);
  CHECK(out.angle == doctest::Approx(std::numbers::pi / 4.0));
  const double decay = std::pow(std::cos(std::numbers::pi / 4.0), 20);
  CHECK(decay == doctest::Approx(std::pow(2.0, -10)));
  CHECK(std::abs(std::abs(out.env_overlap(0, 1)) - decay) <= 1e-10);
  CHECK(std::abs(out.reduced(0, 0) - 0.3) <= 1e-10);
  CHECK(std::abs(out.reduced(1, 1) - 0.7) <= 1e-10);
  CHECK(std::abs(out.reduced(1, 0) - c[1] * std::conj(c[0]) * out.env_overlap(0, 1)) <= 1e-12);

  // pointer-state input stays a product
  const auto single = ideal_model_evolve(cfg, {0.0, 1.0}, 100);
  const Eigen::JacobiSVD<CMatrix> svd(single.joint);
  CHECK(svd.singularValues()(1) < 1e-12);
  CHECK(single.joint.row(0).norm() == 0.0);

  // more qubits, less coherence
  double prev = 1.0;
  for (int K = 2; K <= 12; K += 2) {
    cfg.qubits = K;
    const double off = std::abs(ideal_model_evolve(cfg, c, 100).reduced(0, 1));
    CHECK(off < prev);
    prev = off;
  }

  // a rotated pointer basis
  IdealModelConfig rot;
  rot.system_dim = 2;
  rot.qubits = 6;
  rot.kappa_dt = 0.05;
  rot.pointer_basis = CMatrix(2, 2);
  rot.pointer_basis << 1.0, 1.0, 1.0, -1.0;
  rot.pointer_basis /= std::sqrt(2.0);
  const auto r = ideal_model_evolve(rot, c, 10);
  CHECK(std::abs(r.reduced_pointer(0, 0) - 0.3) < 1e-12);
  CHECK(std::abs(r.reduced_pointer(0, 1)) == doctest::Approx(std::sqrt(0.21) * std::pow(std::cos(0.5), 6)));

  IdealModelConfig big = cfg;
  big.qubits = 30;
  CHECK_THROWS_AS(ideal_model_evolve(big, c, 1), InvalidArgument);
  CHECK_THROWS_AS(ideal_model_evolve(cfg, {1.0, 1.0}, 1), InvalidArgument);
}

TEST_CASE("density matrix JSON round trip") {
  const FockSpace s(6);
  const OscillatorDensityMatrix rho{coherent_projector(Complex(0.5, 0.1), Complex(-0.2, 0.3), s).entries, 1.25};
  const auto back = density_matrix_from_json(to_json(rho));
  CHECK(back.time == 1.25);
  CHECK(max_entry(back.entries - rho.entries) == 0.0);
  auto bad = to_json(rho);
  bad["re"].erase(0);
  CHECK_THROWS_AS(density_matrix_from_json(bad), InvalidArgument);
}
