#include "psd/oscillator/oscillator.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

constexpr Complex I{0.0, 1.0};

// log of |⟨n|α⟩| without the phase, for large n
double log_fock_weight(double r, int n) {
  return -0.5 * r * r + (n > 0 ? n * std::log(r) : 0.0) - 0.5 * std::lgamma(n + 1.0);
}

// (-iω - γ/2) n_i ρ_ij + (iω - γ/2) ρ_ij n_j + γ √((i+1)(j+1)) ρ_{i+1,j+1}
CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& rate, const CMatrix& jump) {
  const auto n = rho.rows();
  CMatrix out = rate.cwiseProduct(rho);
  out.topLeftCorner(n - 1, n - 1) += jump.cwiseProduct(rho.bottomRightCorner(n - 1, n - 1));
  return out;
}

}  // namespace

FockSpace::FockSpace(int n) : n_max(n) {
  if (n < 2) throw InvalidArgument("Fock space needs at least two levels");
  a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  adag = a.adjoint();
  number = adag * a;
}

double OscillatorDensityMatrix::min_eigenvalue() const {
  const CMatrix h = 0.5 * (entries + entries.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double OscillatorDensityMatrix::mean_number() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < entries.rows(); ++k) s += static_cast<double>(k) * entries(k, k).real();
  return s;
}

void LindbladParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("damping rate must be positive");
  if (!std::isfinite(omega)) throw InvalidArgument("frequency must be finite");
}

CVector coherent_state(Complex alpha, const FockSpace& space) {
  const double r2 = std::norm(alpha);
  if (r2 > space.n_max / 4.0)
    throw InvalidArgument("|alpha|^2 = " + std::to_string(r2) + " exceeds n_max/4 = " + std::to_string(space.n_max / 4.0));
  CVector v(space.n_max);
  v(0) = std::exp(-0.5 * r2);
  for (int n = 1; n < space.n_max; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

CompletenessReport completeness_check(const FockSpace& space, double radius, std::size_t samples) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (radius * radius > space.n_max + 1e-12)
    throw InvalidArgument("R^2 above n_max: the integral is dominated by truncated tails");
  if (samples < 10000) throw InvalidArgument("at least 1e4 nodes are needed for the oscillatory integrand");

  CompletenessReport rep;
  rep.radius = radius;
  rep.sector = static_cast<int>(std::floor(radius * radius / 4.0 + 1e-12));
  const int dim = rep.sector + 1;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  rep.samples = side * side;
  const double dr = radius / static_cast<double>(side);
  const double dth = 2.0 * std::numbers::pi / static_cast<double>(side);

  rep.matrix = CMatrix::Zero(dim, dim);
  std::vector<Complex> phase(side);
  for (std::size_t i = 0; i < side; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr;
    std::vector<double> mag(dim);
    for (int n = 0; n < dim; ++n) mag[n] = std::exp(log_fock_weight(r, n));
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n) {
        Complex ang = 0.0;
        for (std::size_t j = 0; j < side; ++j)
          ang += std::exp(I * static_cast<double>(m - n) * ((static_cast<double>(j) + 0.5) * dth));
        rep.matrix(m, n) += mag[m] * mag[n] * ang * (r * dr * dth / std::numbers::pi);
      }
  }
  rep.max_deviation = (rep.matrix - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return rep;
}

OscillatorDensityMatrix lindblad_evolve(const OscillatorDensityMatrix& rho0, const LindbladParams& params, double t,
                                        double dt, LindbladDiagnostics* diagnostics) {
  params.validate();
  const auto n = rho0.entries.rows();
  if (n < 2 || rho0.entries.cols() != n) throw InvalidArgument("density matrix must be square with at least two levels");
  if (!(t >= 0.0)) throw InvalidArgument("evolution time must be non-negative");
  const double limit = 0.01 / std::max(std::abs(params.omega), params.gamma);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw InvalidArgument("dt must lie in (0, 0.01/max(omega, gamma)]");

  CMatrix rate(n, n);
  double fastest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      rate(i, j) = -I * params.omega * static_cast<double>(i - j) - 0.5 * params.gamma * static_cast<double>(i + j);
      fastest = std::max(fastest, std::abs(rate(i, j)));
    }
  CMatrix jump(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n - 1; ++i)
    for (Eigen::Index j = 0; j < n - 1; ++j) jump(i, j) = params.gamma * std::sqrt(static_cast<double>((i + 1) * (j + 1)));

  // The top Fock levels rotate and decay n_max times faster than the mode itself; dt is split
  // so that h·|rate| ≤ 1/4 everywhere, which keeps RK4 well inside its accuracy region.
  const std::size_t outer = t == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const std::size_t sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.0 * fastest * dt - 1e-9)));
  const std::size_t steps = outer * sub;
  const double h = steps ? t / static_cast<double>(steps) : 0.0;

  LindbladDiagnostics diag_out;
  diag_out.steps = steps;
  diag_out.step = h;
  diag_out.symmetrized = (rho0.entries - rho0.entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-10;

  auto leakage = [n](const CMatrix& r) { return std::max(std::abs(r(n - 1, n - 1)), std::abs(r(n - 2, n - 2))); };
  const Complex trace0 = rho0.entries.trace();
  CMatrix rho = rho0.entries;
  for (std::size_t s = 0; s <= steps; ++s) {
    if (s > 0) {
      const CMatrix k1 = lindblad_rhs(rho, rate, jump);
      const CMatrix k2 = lindblad_rhs(rho + 0.5 * h * k1, rate, jump);
      const CMatrix k3 = lindblad_rhs(rho + 0.5 * h * k2, rate, jump);
      const CMatrix k4 = lindblad_rhs(rho + h * k3, rate, jump);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (diag_out.symmetrized) {
        const CMatrix herm = 0.5 * (rho + rho.adjoint());
        diag_out.max_symmetrized = std::max(diag_out.max_symmetrized, (rho - herm).cwiseAbs().maxCoeff());
        rho = herm;
      }
    }
    const double leak = leakage(rho);
    diag_out.max_leakage = std::max(diag_out.max_leakage, leak);
    if (leak > 1e-6)
      throw NumericalAbort("Fock truncation leakage " + std::to_string(leak) + " in the top two levels at t = " +
                           std::to_string(static_cast<double>(s) * h) + "; raise n_max");
    if (!rho.allFinite()) throw NumericalAbort("density matrix became non-finite");
  }
  diag_out.trace_drift = std::abs(rho.trace() - trace0);
  if (diag_out.trace_drift > 1e-8) spdlog::warn("Lindblad trace drift {:.3e}", diag_out.trace_drift);
  if (diag_out.max_symmetrized > 0.0) spdlog::debug("Lindblad symmetrization removed up to {:.3e}", diag_out.max_symmetrized);
  if (diagnostics) *diagnostics = diag_out;
  return {rho, rho0.time + t};
}

Complex damped_amplitude(Complex alpha, const LindbladParams& params, double t) {
  return alpha * std::exp(Complex(-0.5 * params.gamma, -params.omega) * t);
}

Complex decoherence_factor(Complex alpha, Complex beta, const LindbladParams& params, double t) {
  const Complex log_overlap = -0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(beta) * alpha;
  return std::exp(-std::expm1(-params.gamma * t) * log_overlap);
}

OscillatorDensityMatrix coherent_projector(Complex alpha, Complex beta, const FockSpace& space) {
  return {coherent_state(alpha, space) * coherent_state(beta, space).adjoint(), 0.0};
}

OscillatorDensityMatrix analytic_solution(Complex alpha, Complex beta, const LindbladParams& params, double t,
                                          const FockSpace& space) {
  params.validate();
  if (!(t >= 0.0)) throw InvalidArgument("evolution time must be non-negative");
  const CVector a = coherent_state(damped_amplitude(alpha, params, t), space);
  const CVector b = coherent_state(damped_amplitude(beta, params, t), space);
  // the initial amplitudes bound the damped ones; check them too
  coherent_state(alpha, space);
  coherent_state(beta, space);
  return {decoherence_factor(alpha, beta, params, t) * a * b.adjoint(), t};
}

double trace_norm(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m).singularValues().sum();
}

SuperpositionState superposition_decoherence(Complex c1, Complex alpha, Complex c2, Complex beta,
                                             const LindbladParams& params, double t, const FockSpace& space) {
  if (std::abs(alpha - beta) < 1e-12) throw InvalidArgument("alpha and beta must differ for two independent branches");
  const double norm2 = std::norm(c1) + std::norm(c2) + 2.0 * (std::conj(c1) * c2 * coherent_overlap(alpha, beta)).real();
  if (std::abs(norm2 - 1.0) > 1e-8) throw InvalidArgument("superposition is not normalized: <S|S> = " + std::to_string(norm2));

  SuperpositionState out;
  const CMatrix aa = analytic_solution(alpha, alpha, params, t, space).entries;
  const CMatrix bb = analytic_solution(beta, beta, params, t, space).entries;
  const CMatrix ab = analytic_solution(alpha, beta, params, t, space).entries;
  const CMatrix ba = analytic_solution(beta, alpha, params, t, space).entries;
  out.cross = {c1 * std::conj(c2) * ab + c2 * std::conj(c1) * ba, t};
  out.rho = {std::norm(c1) * aa + std::norm(c2) * bb + out.cross.entries, t};
  out.coherence = trace_norm(out.cross.entries);
  out.f = decoherence_factor(alpha, beta, params, t);
  return out;
}

CMatrix IdealModelConfig::pointers() const {
  return pointer_basis.size() == 0 ? CMatrix::Identity(system_dim, system_dim) : pointer_basis;
}

void IdealModelConfig::validate() const {
  if (system_dim < 1) throw InvalidArgument("system dimension must be positive");
  if (qubits < 1) throw InvalidArgument("at least one environment qubit is required");
  if (qubits > 40 || static_cast<std::size_t>(system_dim) << qubits > max_dimension)
    throw InvalidArgument("joint dimension n*2^K exceeds the configured cap");
  if (!std::isfinite(kappa_dt)) throw InvalidArgument("coupling angle must be finite");
  const CMatrix p = pointers();
  if (p.rows() != system_dim || p.cols() != system_dim) throw InvalidArgument("pointer basis must be n x n");
  if ((p.adjoint() * p - CMatrix::Identity(system_dim, system_dim)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("pointer vectors must be orthonormal");
}

IdealModelState ideal_model_evolve(const IdealModelConfig& config, const std::vector<Complex>& c, std::size_t steps) {
  config.validate();
  const int n = config.system_dim;
  const int K = config.qubits;
  if (static_cast<int>(c.size()) != n) throw InvalidArgument("one coefficient per pointer state is required");
  double norm2 = 0.0;
  for (const auto& x : c) norm2 += std::norm(x);
  if (std::abs(norm2 - 1.0) > 1e-10) throw InvalidArgument("system coefficients must be normalized");

  // per-branch, per-qubit environment states, stepped explicitly
  std::vector<std::vector<Eigen::Vector2cd>> env(n, std::vector<Eigen::Vector2cd>(K, Eigen::Vector2cd(1.0, 0.0)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) {
      const double phi = std::numbers::pi * k / K;
      const double theta = i * config.kappa_dt;
      Eigen::Matrix2cd rot;
      rot << std::cos(theta), -I * std::sin(theta) * std::exp(-I * phi), -I * std::sin(theta) * std::exp(I * phi),
          std::cos(theta);
      for (std::size_t s = 0; s < steps; ++s) env[i][k] = rot * env[i][k];
    }

  const std::size_t dimE = std::size_t{1} << K;
  CMatrix branch(n, static_cast<Eigen::Index>(dimE));
  for (int i = 0; i < n; ++i)
    for (std::size_t e = 0; e < dimE; ++e) {
      Complex v = 1.0;
      for (int k = 0; k < K; ++k) v *= env[i][k]((e >> k) & 1U);
      branch(i, static_cast<Eigen::Index>(e)) = v;
    }

  IdealModelState out;
  out.steps = steps;
  out.angle = static_cast<double>(steps) * config.kappa_dt;
  const CMatrix p = config.pointers();
  CMatrix coeff = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) coeff(i, i) = c[i];
  out.joint = p * coeff * branch;
  out.env_overlap = branch.conjugate() * branch.transpose();
  out.reduced = out.joint * out.joint.adjoint();
  out.reduced_pointer = p.adjoint() * out.reduced * p;
  return out;
}

nlohmann::json to_json(const OscillatorDensityMatrix& rho) {
  const auto n = rho.entries.rows();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> r(n), q(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      r[j] = rho.entries(i, j).real();
      q[j] = rho.entries(i, j).imag();
    }
    re.push_back(r);
    im.push_back(q);
  }
  return {{"time", rho.time}, {"dim", n}, {"re", re}, {"im", im}};
}

OscillatorDensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  const auto n = j.at("dim").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (n < 1 || re.size() != static_cast<std::size_t>(n) || im.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("density matrix JSON has inconsistent dimensions");
  OscillatorDensityMatrix rho{CMatrix(n, n), j.at("time").get<double>()};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (re[i].size() != static_cast<std::size_t>(n) || im[i].size() != static_cast<std::size_t>(n))
      throw InvalidArgument("density matrix JSON row has the wrong length");
    for (Eigen::Index j2 = 0; j2 < n; ++j2) rho.entries(i, j2) = {re[i][j2].get<double>(), im[i][j2].get<double>()};
  }
  return rho;
}

}  // namespace psd
