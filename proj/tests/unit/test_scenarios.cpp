#include <doctest.h>

#include <cmath>
#include <complex>

#include "psd/core/errors.hpp"
#include "psd/scenarios/scenario.hpp"

using namespace psd;
using nlohmann::json;

namespace {

// Transmission through V(x) = v0 on [0, a] by matching plane waves at both edges.
double transfer_matrix_transmission(double k, double v0, double a, double m) {
  using C = std::complex<double>;
  const C q = std::sqrt(C(k * k - 2.0 * m * v0, 0.0));
  // ψ = e^{ikx} + r e^{-ikx} (x<0), A e^{iqx} + B e^{-iqx} (0<x<a), t e^{ikx} (x>a)
  // continuity of ψ and ψ' at x = a fixes A, B in terms of t; then x = 0 fixes the incoming amplitude.
  const C ik(0.0, k), iq = C(0.0, 1.0) * q;
  const C ea = std::exp(ik * a);
  const C A = ea * (iq + ik) / (2.0 * iq) * std::exp(-iq * a);
  const C B = ea * (iq - ik) / (2.0 * iq) * std::exp(iq * a);
  const C incoming = ((A + B) + (iq * (A - B)) / ik) / 2.0;  // per unit t
  return 1.0 / std::norm(incoming);
}

json barrier(json extra = json::object()) {
  json j{{"kind", "barrier-scattering"}};
  j.update(extra);
  return j;
}

std::string constraint_of(const json& config) {
  try {
    resolve_spec(config);
  } catch (const ResolvabilityError& e) {
    return e.constraint();
  }
  return {};
}

}  // namespace

TEST_CASE("spec resolution") {
  SUBCASE("defaults are materialized") {
    for (const auto& kind : scenario_kinds()) {
      const ScenarioSpec s = resolve_spec({{"kind", kind}});
      CHECK(s.kind == kind);
      CHECK(s.params.contains("horizon"));
      CHECK(s.params.contains("seed"));
      CHECK(s.to_json()["kind"] == kind);
    }
  }
  SUBCASE("overrides") {
    const ScenarioSpec s = resolve_spec(barrier({{"barrier_height", 3.0}, {"seed", 7}}));
    CHECK(s.number("barrier_height") == 3.0);
    CHECK(s.integer("seed") == 7);
  }
  SUBCASE("malformed configs") {
    CHECK_THROWS_AS(resolve_spec(json::array()), InvalidArgument);
    CHECK_THROWS_AS(resolve_spec({{"cells", 10}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_spec({{"kind", "teleporter"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve_spec(barrier({{"barrier_heigth", 1.0}})), InvalidArgument);
    CHECK_THROWS_AS(resolve_spec(barrier({{"cells", 10.5}})), InvalidArgument);
    CHECK_THROWS_AS(resolve_spec(barrier({{"barrier_height", "high"}})), InvalidArgument);
  }
  SUBCASE("resolvability constraints are named") {
    CHECK(constraint_of(barrier({{"packet_width", 0.5}})) == "packet_width_cells");
    CHECK(constraint_of(barrier({{"packet_center", -100.0}})) == "boundary_margin");
    CHECK(constraint_of(barrier({{"packet_momentum", -1.0}})) == "rightward_momentum");
    CHECK(constraint_of(barrier({{"packet_center", -20.0}})) == "packet_left_of_barrier");
    CHECK(constraint_of(barrier({{"dt", 0.0}})) == "positive_step");
    CHECK(constraint_of(barrier({{"epsilon_w", 2.0}})) == "epsilon_range");
    CHECK(constraint_of({{"kind", "double-slit-photon"}, {"horizon", 400.0}}) == "spreading_exits_grid");
    CHECK(constraint_of({{"kind", "measurement-toy"}, {"pointer_shift", 60.0}}) == "pointer_range");
    CHECK(constraint_of({{"kind", "beam-splitter"}, {"horizon", 20.0}}) == "horizon_covers_amplification");
    CHECK(constraint_of(barrier()).empty());
  }
}

TEST_CASE("barrier transmission formula") {
  for (double k : {0.5, 1.0, 1.9, 2.0, 2.1, 3.0})
    for (double v0 : {0.5, 2.0, 8.0})
      for (double a : {0.5, 1.0, 2.0}) {
        const double e = k * k / 2.0;
        if (std::abs(e - v0) < 1e-3) continue;
        CHECK(rectangular_barrier_transmission(k, v0, a, 1.0) ==
              doctest::Approx(transfer_matrix_transmission(k, v0, a, 1.0)).epsilon(1e-9));
      }
  // E = V: continuous through the crossover
  CHECK(rectangular_barrier_transmission(2.0, 2.0, 1.0, 1.0) ==
        doctest::Approx(rectangular_barrier_transmission(2.0, 2.0 + 1e-7, 1.0, 1.0)).epsilon(1e-5));
  CHECK(rectangular_barrier_transmission(2.0, 0.0, 1.0, 1.0) == 1.0);
  // a wide packet averages over a narrow momentum band
  CHECK(packet_transmission(2.0, 200.0, 2.5, 1.0, 1.0) ==
        doctest::Approx(rectangular_barrier_transmission(2.0, 2.5, 1.0, 1.0)).epsilon(1e-3));
}

TEST_CASE("barrier scattering scenario") {
  SUBCASE("50/50 barrier") {
    const ScenarioResult r = run_scenario(resolve_spec(barrier()));
    CHECK(r.passed());
    const double T = r.observables["T"];
    CHECK(T > 0.4);
    CHECK(T < 0.6);
    CHECK(r.verdict("T_plus_R").value <= 1e-6);
    CHECK(r.tree->branch_events.size() == 1);
    CHECK(r.column("w").back() <= 0.05);
    CHECK(r.column("t").size() == r.rows.size());
  }
  SUBCASE("no barrier, no branch") {
    const ScenarioResult r = run_scenario(resolve_spec(barrier({{"barrier_height", 0.0}})));
    CHECK(r.passed());
    CHECK(r.tree->branch_events.empty());
    for (double c : r.column("committed")) CHECK(c == 1.0);
  }
  SUBCASE("opaque barrier") {
    const ScenarioResult r = run_scenario(resolve_spec(barrier({{"barrier_height", 8.0}})));
    CHECK(double(r.observables["T"]) <= 0.01);
    CHECK(r.verdict("T_vs_oracle").passed);
    CHECK(r.verdict("branch_events").passed);
    // visible to a finer detector
    const ScenarioResult fine = run_scenario(resolve_spec(barrier({{"barrier_height", 8.0}, {"theta", 0.001}})));
    CHECK(fine.tree->branch_events.size() == 1);
  }
  SUBCASE("boundary contact aborts") {
    CHECK_THROWS_AS(run_scenario(resolve_spec(barrier({{"horizon", 120.0}}))), NumericalAbort);
  }
}

TEST_CASE("measurement toy scenario") {
  const ScenarioResult r = run_scenario(resolve_spec({{"kind", "measurement-toy"}}));
  CHECK(r.passed());
  CHECK(double(r.observables["w_preferred"]) <= 0.01);
  CHECK(double(r.observables["w_rival"]) == doctest::Approx(1.0).epsilon(1e-6));
  // K = 20, κt = π/4
  CHECK(double(r.observables["env_overlap"]) == doctest::Approx(std::pow(std::cos(M_PI / 4), 20)).epsilon(1e-10));
  CHECK(r.column("pointer_separation").back() == doctest::Approx(48.0).epsilon(1e-3));

  const ScenarioResult tilted =
      run_scenario(resolve_spec({{"kind", "measurement-toy"}, {"weight", 0.8}, {"relative_phase", 1.0}}));
  CHECK(tilted.passed());
}

TEST_CASE("double slit scenario") {
  const ScenarioResult r = run_scenario(resolve_spec({{"kind", "double-slit-photon"}}));
  CHECK(r.passed());
  // ⟨γ₁|γ₂⟩ for equal-width Gaussians D apart
  CHECK(double(r.observables["photon_overlap"]) == doctest::Approx(std::exp(-14.0 * 14.0 / 64.0)).epsilon(1e-8));
  const auto w = r.column("w");
  CHECK(w.front() <= 0.05);
  CHECK(w.back() >= 0.5);
}

TEST_CASE("result serialization") {
  const ScenarioSpec spec = resolve_spec(barrier({{"horizon", 5.0}}));
  const ScenarioResult a = run_scenario(spec), b = run_scenario(spec);
  const std::string csv = to_csv(a);
  CHECK(csv.rfind("# config: ", 0) == 0);
  CHECK(csv.find("\nt,channels,") != std::string::npos);
  CHECK(csv == to_csv(b));
  CHECK(to_json(a).dump() == to_json(b).dump());
  const json j = to_json(a);
  CHECK(j["config"] == spec.to_json());
  CHECK(j.contains("tree"));
  CHECK(j["verdicts"].is_array());
}
