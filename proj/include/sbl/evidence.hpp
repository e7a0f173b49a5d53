#pragma once

#include "sbl/types.hpp"

namespace sbl {

// One factorization of the evidence model at a fixed gamma, with lazy access
// to the posterior and derivative quantities. Route selection per active set
// size J: identity dictionaries use closed-form diagonal expressions; m <= |J|
// factors the m x m matrix S = beta^-1 I + F_J Gamma_J F_J^T; otherwise the
// |J| x |J| matrix A = Gamma_J^-1 + beta F_J^T F_J.
//
// Instances are cheap views tied to the problem and gamma they were built
// from; they are not safe to share across threads (lazy members), but
// distinct instances are independent.
class EvidenceState {
 public:
  EvidenceState(const ProblemInstance& problem, const HyperparamVector& gamma,
                SolveMode mode = SolveMode::Fast);

  double objective() const { return quad_ + log_det_s_; }
  double quad_term() const { return quad_; }
  double log_det_s() const { return log_det_s_; }

  const Vector& mean() const;
  const Vector& cov_diag() const;
  // diag(Z) on the active set only (zeros elsewhere); cheap shared
  // factorization byproduct, used by the AMQ half step.
  const Vector& z_diag_active() const;
  // Full diag(Z) and u including pruned indices.
  const Vector& z_diag_full() const;
  const Vector& u_full() const;

  PosteriorMoments moments() const;
  EvidenceDerivatives derivatives() const;

 private:
  enum class Route { Identity, FactorS, FactorA, Oracle };

  void factorize();
  void ensure_mean_cov() const;

  const ProblemInstance* problem_;
  HyperparamVector gamma_;
  SolveMode mode_;
  Route route_;
  std::vector<Eigen::Index> active_;

  double quad_ = 0.0;
  double log_det_s_ = 0.0;

  // FactorS: Cholesky factor of S (m x m); FactorA: of A (|J| x |J|).
  Matrix chol_lower_;
  Vector v_;  // S^-1 y
  Matrix gram_jj_;  // F_J^T F_J kept on the FactorA route for Z_ii
  Matrix oracle_s_inv_;

  mutable bool have_mean_cov_ = false;
  mutable Vector mean_;
  mutable Vector cov_diag_;
  mutable bool have_z_active_ = false;
  mutable Vector z_active_;
  mutable bool have_z_full_ = false;
  mutable Vector z_full_;
  mutable bool have_u_ = false;
  mutable Vector u_;
};

// L(gamma) = y^T S^-1 y + log det S.
double evidence_objective(const HyperparamVector& gamma, const ProblemInstance& problem);

// Posterior mean and covariance diagonal (full covariance in Oracle mode).
PosteriorMoments posterior_moments(const HyperparamVector& gamma, const ProblemInstance& problem,
                                   SolveMode mode = SolveMode::Fast);

// diag(Z), u, gradient dL/dgamma_i = Z_ii - u_i^2.
EvidenceDerivatives evidence_derivatives(const HyperparamVector& gamma,
                                         const ProblemInstance& problem);

// beta ||F x - y||^2 + sum_i x_i^2 / gamma_i over active i, +infinity when
// any pruned index carries a nonzero x_i.
double auxiliary_objective(const Vector& x, const HyperparamVector& gamma,
                           const ProblemInstance& problem);

// Upper bound on log det S(gamma) anchored at gamma_anchor:
//   log det S(anchor) + sum_J Sigma_ii(anchor) (1/gamma_i - 1/anchor_i)
//                     + sum_J (log gamma_i - log anchor_i).
// Both vectors must share the same active set and be positive on it.
double em_surrogate_value(const HyperparamVector& gamma, const HyperparamVector& gamma_anchor,
                          const ProblemInstance& problem);

// Hessian of Psi(theta) = log det S(theta^-2) in theta coordinates:
//   diag(6 gamma_i^2 Z_ii) - 4 D^{3/2} (Z o Z) D^{3/2},  D = diag(gamma).
// Dense test-only assembly, limited to n <= 64; gamma must be strictly
// positive.
Matrix theta_space_hessian(const HyperparamVector& gamma, const ProblemInstance& problem);

// min(gamma_i, |Z_ii - u_i^2|) per index; small everywhere at a stationary
// point (each index is either pruned or has zero gradient).
Vector stationarity_residual(const HyperparamVector& gamma, const ProblemInstance& problem);

}  // namespace sbl
