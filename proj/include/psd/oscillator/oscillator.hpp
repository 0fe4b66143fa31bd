#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "psd/core/grid.hpp"

namespace psd {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Truncated Fock space with levels 0..n_max-1.
struct FockSpace {
  explicit FockSpace(int n_max = 40);

  int n_max;
  CMatrix a;
  CMatrix adag;
  CMatrix number;  // a†a
};

struct OscillatorDensityMatrix {
  CMatrix entries;
  double time = 0.0;

  double trace_deviation(Complex expected = 1.0) const { return std::abs(entries.trace() - expected); }
  double hermiticity_error() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const;
  double mean_number() const;
};

struct LindbladParams {
  double omega = 1.0;
  double gamma = 1.0;

  void validate() const;
};

/// e^{-|α|²/2} αⁿ/√n!; requires |α|² ≤ n_max/4.
CVector coherent_state(Complex alpha, const FockSpace& space);

/// ⟨α|β⟩ = exp(-|α|²/2 - |β|²/2 + α*β)
Complex coherent_overlap(Complex alpha, Complex beta);

struct CompletenessReport {
  double radius = 0.0;
  std::size_t samples = 0;
  int sector = 0;            // levels 0..sector are compared with the identity
  CMatrix matrix;            // (1/π) Σ |α⟩⟨α| ΔA restricted to the sector
  double max_deviation = 0;  // max |matrix - I|
};

/// Polar midpoint rule for (1/π)∫_{|α|≤R} |α⟩⟨α| d²α with about M nodes.
CompletenessReport completeness_check(const FockSpace& space, double radius, std::size_t samples);

struct LindbladDiagnostics {
  std::size_t steps = 0;
  double step = 0.0;
  double trace_drift = 0.0;
  double max_leakage = 0.0;     // largest |ρ_nn| over the top two levels
  double max_symmetrized = 0.0;  // largest Hermiticity defect removed per step
  bool symmetrized = false;
};

/// Classical RK4 for ρ̇ = (-iω - γ/2)a†aρ + (iω - γ/2)ρa†a + γaρa†.
/// Hermitian seeds are re-symmetrized after each step; general seeds evolve linearly.
OscillatorDensityMatrix lindblad_evolve(const OscillatorDensityMatrix& rho0, const LindbladParams& params, double t,
                                        double dt, LindbladDiagnostics* diagnostics = nullptr);

/// f(t) = ⟨β|α⟩^{1-e^{-γt}}, continued along the exponent of ⟨β|α⟩ rather than the principal log.
Complex decoherence_factor(Complex alpha, Complex beta, const LindbladParams& params, double t);

/// α e^{(-iω-γ/2)t}
Complex damped_amplitude(Complex alpha, const LindbladParams& params, double t);

/// f(t)|α_t⟩⟨β_t|
OscillatorDensityMatrix analytic_solution(Complex alpha, Complex beta, const LindbladParams& params, double t,
                                          const FockSpace& space);

OscillatorDensityMatrix coherent_projector(Complex alpha, Complex beta, const FockSpace& space);

struct SuperpositionState {
  OscillatorDensityMatrix rho;
  OscillatorDensityMatrix cross;  // interference terms only
  double coherence = 0.0;         // trace norm of the cross terms
  Complex f = 1.0;                // decoherence factor of the (α, β) term
};

/// ρ(t) for |S⟩ = c₁|α⟩ + c₂|β⟩ assembled from the four evolved coherent-state terms.
SuperpositionState superposition_decoherence(Complex c1, Complex alpha, Complex c2, Complex beta,
                                             const LindbladParams& params, double t, const FockSpace& space);

double trace_norm(const CMatrix& m);

struct IdealModelConfig {
  int system_dim = 2;
  CMatrix pointer_basis;  // columns |S_i⟩; identity when empty
  int qubits = 1;         // K
  double kappa_dt = 0.01;
  std::size_t max_dimension = std::size_t{1} << 23;

  CMatrix pointers() const;
  void validate() const;
};

struct IdealModelState {
  std::size_t steps = 0;
  double angle = 0.0;    // κt
  CMatrix joint;         // system index × environment basis index
  CMatrix env_overlap;   // ⟨E_i|E_j⟩
  CMatrix reduced;       // ρ_S in the standard basis
  CMatrix reduced_pointer;  // ρ_S in the pointer basis
};

/// U(t) = Σ|S_i⟩⟨S_i| ⊗ U_i(t): branch i rotates env qubit k by i·κdt per step about an axis in the xy-plane
/// at azimuth πk/K.
IdealModelState ideal_model_evolve(const IdealModelConfig& config, const std::vector<Complex>& c, std::size_t steps);

nlohmann::json to_json(const OscillatorDensityMatrix& rho);
OscillatorDensityMatrix density_matrix_from_json(const nlohmann::json& j);

}  // namespace psd
