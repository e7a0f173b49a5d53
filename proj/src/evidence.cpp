#include "sbl/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbl {

namespace {

// SPD Cholesky with one jitter retry (1e-12 * trace / dim on the diagonal).
Eigen::LLT<Matrix> chol_with_retry(const Matrix& m, const char* label) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double trace = m.trace();
  const double jitter = 1e-12 * trace / static_cast<double>(m.rows());
  Matrix jittered = m;
  jittered.diagonal().array() += jitter;
  llt.compute(jittered);
  if (llt.info() == Eigen::Success) return llt;
  std::ostringstream os;
  os << label << " factorization failed after jitter retry (dim=" << m.rows()
     << ", trace=" << trace << ", jitter=" << jitter << ")";
  throw NumericalError(os.str());
}

Matrix gather_columns(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

Matrix gather_block(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  return out;
}

}  // namespace

EvidenceState::EvidenceState(const ProblemInstance& problem, const HyperparamVector& gamma,
                             SolveMode mode)
    : problem_(&problem), gamma_(gamma), mode_(mode) {
  if (gamma_.size() != problem.cols()) {
    std::ostringstream os;
    os << "gamma length " << gamma_.size() << " does not match dictionary columns "
       << problem.cols();
    throw InputError(os.str());
  }
  active_ = gamma_.active_indices();
  factorize();
}

void EvidenceState::factorize() {
  const Matrix& F = problem_->dictionary();
  const Vector& y = problem_->observation();
  const double beta = problem_->noise_precision();
  const double b = 1.0 / beta;
  const Eigen::Index m = F.rows();
  const Eigen::Index n = F.cols();
  const Eigen::Index j_count = static_cast<Eigen::Index>(active_.size());

  if (mode_ == SolveMode::Oracle) {
    route_ = Route::Oracle;
    Matrix s = b * Matrix::Identity(m, m);
    s.noalias() += F * gamma_.values().asDiagonal() * F.transpose();
    oracle_s_inv_ = s.inverse();
    v_ = oracle_s_inv_ * y;
    quad_ = y.dot(v_);
    // log det via LU diagonal; S is SPD so the determinant is positive.
    Eigen::PartialPivLU<Matrix> lu(s);
    log_det_s_ = lu.matrixLU().diagonal().array().abs().log().sum();
    mean_ = gamma_.values().asDiagonal() * (F.transpose() * v_);
    return;
  }

  if (problem_->is_identity()) {
    route_ = Route::Identity;
    // S is diagonal with entries b + gamma_i.
    Vector d = gamma_.values().array() + b;
    v_ = y.cwiseQuotient(d);
    quad_ = y.dot(v_);
    log_det_s_ = d.array().log().sum();
    mean_ = gamma_.values().cwiseProduct(v_);
    return;
  }

  if (j_count == 0) {
    // Empty active set: S = b I exactly.
    route_ = Route::FactorS;
    v_ = beta * y;
    quad_ = y.dot(v_);
    log_det_s_ = static_cast<double>(m) * std::log(b);
    mean_ = Vector::Zero(n);
    return;
  }

  if (m <= j_count) {
    route_ = Route::FactorS;
    Matrix scaled(m, j_count);
    for (Eigen::Index j = 0; j < j_count; ++j) {
      scaled.col(j) = F.col(active_[static_cast<size_t>(j)]) *
                      std::sqrt(gamma_[active_[static_cast<size_t>(j)]]);
    }
    Matrix s = Matrix::Zero(m, m);
    s.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    s.diagonal().array() += b;
    Eigen::LLT<Matrix> llt = chol_with_retry(s, "S");
    chol_lower_ = llt.matrixL();
    v_ = llt.solve(y);
    quad_ = y.dot(v_);
    log_det_s_ = 2.0 * chol_lower_.diagonal().array().log().sum();
    mean_ = Vector::Zero(n);
    for (Eigen::Index i : active_) mean_[i] = gamma_[i] * F.col(i).dot(v_);
    return;
  }

  // |J| < m: factor A = Gamma_J^-1 + beta F_J^T F_J instead of S.
  route_ = Route::FactorA;
  if (problem_->has_gram()) {
    gram_jj_ = gather_block(problem_->gram(), active_);
  } else {
    Matrix fj = gather_columns(F, active_);
    gram_jj_ = fj.transpose() * fj;
  }
  Matrix a = beta * gram_jj_;
  for (Eigen::Index j = 0; j < j_count; ++j) {
    a(j, j) += 1.0 / gamma_[active_[static_cast<size_t>(j)]];
  }
  Eigen::LLT<Matrix> llt = chol_with_retry(a, "A");
  chol_lower_ = llt.matrixL();

  Vector rhs(j_count);
  for (Eigen::Index j = 0; j < j_count; ++j) {
    rhs[j] = beta * problem_->dictionary_t_obs()[active_[static_cast<size_t>(j)]];
  }
  Vector mu_j = llt.solve(rhs);
  mean_ = Vector::Zero(n);
  for (Eigen::Index j = 0; j < j_count; ++j) mean_[active_[static_cast<size_t>(j)]] = mu_j[j];

  Vector residual = y;
  for (Eigen::Index j = 0; j < j_count; ++j) {
    residual.noalias() -= F.col(active_[static_cast<size_t>(j)]) * mu_j[j];
  }
  v_ = beta * residual;
  quad_ = y.dot(v_);

  double log_det_a = 2.0 * chol_lower_.diagonal().array().log().sum();
  double sum_log_gamma = 0.0;
  for (Eigen::Index i : active_) sum_log_gamma += std::log(gamma_[i]);
  log_det_s_ = log_det_a + sum_log_gamma + static_cast<double>(m) * std::log(b);
}

const Vector& EvidenceState::mean() const { return mean_; }

void EvidenceState::ensure_mean_cov() const {
  if (have_mean_cov_) return;
  const Matrix& F = problem_->dictionary();
  const double beta = problem_->noise_precision();
  const double b = 1.0 / beta;
  const Eigen::Index n = problem_->cols();
  const Eigen::Index j_count = static_cast<Eigen::Index>(active_.size());

  cov_diag_ = Vector::Zero(n);
  z_active_ = Vector::Zero(n);

  switch (route_) {
    case Route::Identity: {
      for (Eigen::Index i : active_) {
        const double d = b + gamma_[i];
        z_active_[i] = 1.0 / d;
        cov_diag_[i] = gamma_[i] * b / d;
      }
      break;
    }
    case Route::FactorS: {
      if (j_count == 0) break;
      Matrix x = gather_columns(F, active_);
      chol_lower_.triangularView<Eigen::Lower>().solveInPlace(x);
      for (Eigen::Index j = 0; j < j_count; ++j) {
        const Eigen::Index i = active_[static_cast<size_t>(j)];
        const double z = x.col(j).squaredNorm();
        z_active_[i] = z;
        cov_diag_[i] = gamma_[i] * std::max(0.0, 1.0 - gamma_[i] * z);
      }
      break;
    }
    case Route::FactorA: {
      // diag(A^-1) from the columns of L^-1; Z_ii from the Woodbury form
      // beta G_ii - beta^2 ||L^-1 G_{J,i}||^2 (no cancellation at small Z).
      Matrix linv = Matrix::Identity(j_count, j_count);
      chol_lower_.triangularView<Eigen::Lower>().solveInPlace(linv);
      Matrix w = linv * gram_jj_;
      for (Eigen::Index j = 0; j < j_count; ++j) {
        const Eigen::Index i = active_[static_cast<size_t>(j)];
        cov_diag_[i] = linv.col(j).squaredNorm();
        const double g_ii = gram_jj_(j, j);
        z_active_[i] = std::max(0.0, beta * g_ii - beta * beta * w.col(j).squaredNorm());
      }
      break;
    }
    case Route::Oracle: {
      for (Eigen::Index i : active_) {
        const double z = F.col(i).dot(oracle_s_inv_ * F.col(i));
        z_active_[i] = std::max(0.0, z);
        cov_diag_[i] = std::max(0.0, gamma_[i] - gamma_[i] * gamma_[i] * z);
      }
      break;
    }
  }
  have_mean_cov_ = true;
  have_z_active_ = true;
}

const Vector& EvidenceState::cov_diag() const {
  ensure_mean_cov();
  return cov_diag_;
}

const Vector& EvidenceState::z_diag_active() const {
  ensure_mean_cov();
  return z_active_;
}

const Vector& EvidenceState::z_diag_full() const {
  if (have_z_full_) return z_full_;
  const Matrix& F = problem_->dictionary();
  const double beta = problem_->noise_precision();
  const double b = 1.0 / beta;
  const Eigen::Index n = problem_->cols();
  const Eigen::Index j_count = static_cast<Eigen::Index>(active_.size());

  switch (route_) {
    case Route::Identity: {
      z_full_ = (gamma_.values().array() + b).inverse();
      break;
    }
    case Route::FactorS: {
      if (j_count == 0) {
        z_full_ = beta * problem_->column_sq_norms();
      } else {
        Matrix x = F;
        chol_lower_.triangularView<Eigen::Lower>().solveInPlace(x);
        z_full_ = x.colwise().squaredNorm().transpose();
      }
      break;
    }
    case Route::FactorA: {
      Matrix cross(j_count, n);
      if (problem_->has_gram()) {
        for (Eigen::Index j = 0; j < j_count; ++j) {
          cross.row(j) = problem_->gram().row(active_[static_cast<size_t>(j)]);
        }
      } else {
        Matrix fj = gather_columns(F, active_);
        cross.noalias() = fj.transpose() * F;
      }
      chol_lower_.triangularView<Eigen::Lower>().solveInPlace(cross);
      z_full_ = (beta * problem_->column_sq_norms().array() -
                 beta * beta * cross.colwise().squaredNorm().transpose().array())
                    .max(0.0);
      break;
    }
    case Route::Oracle: {
      z_full_.resize(n);
      Matrix si_f = oracle_s_inv_ * F;
      for (Eigen::Index i = 0; i < n; ++i) {
        z_full_[i] = std::max(0.0, F.col(i).dot(si_f.col(i)));
      }
      break;
    }
  }
  have_z_full_ = true;
  return z_full_;
}

const Vector& EvidenceState::u_full() const {
  if (have_u_) return u_;
  if (route_ == Route::Identity) {
    u_ = v_;
  } else {
    u_ = problem_->dictionary().transpose() * v_;
  }
  have_u_ = true;
  return u_;
}

PosteriorMoments EvidenceState::moments() const {
  PosteriorMoments out;
  out.mean = mean();
  out.cov_diag = cov_diag();
  if (mode_ == SolveMode::Oracle) {
    const Matrix& F = problem_->dictionary();
    const Vector& g = gamma_.values();
    Matrix z = F.transpose() * oracle_s_inv_ * F;
    out.full_cov = g.asDiagonal() * Matrix::Identity(g.size(), g.size()) -
                   g.asDiagonal() * z * g.asDiagonal();
    out.has_full_cov = true;
  }
  return out;
}

EvidenceDerivatives EvidenceState::derivatives() const {
  EvidenceDerivatives out;
  out.z_diag = z_diag_full();
  out.u = u_full();
  out.gradient = out.z_diag - out.u.cwiseAbs2();
  return out;
}

double evidence_objective(const HyperparamVector& gamma, const ProblemInstance& problem) {
  return EvidenceState(problem, gamma).objective();
}

PosteriorMoments posterior_moments(const HyperparamVector& gamma, const ProblemInstance& problem,
                                   SolveMode mode) {
  return EvidenceState(problem, gamma, mode).moments();
}

EvidenceDerivatives evidence_derivatives(const HyperparamVector& gamma,
                                         const ProblemInstance& problem) {
  return EvidenceState(problem, gamma).derivatives();
}

double auxiliary_objective(const Vector& x, const HyperparamVector& gamma,
                           const ProblemInstance& problem) {
  if (x.size() != problem.cols() || gamma.size() != problem.cols()) {
    throw InputError("auxiliary objective operands must match dictionary columns");
  }
  double prior = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (gamma.is_active(i)) {
      prior += x[i] * x[i] / gamma[i];
    } else if (x[i] != 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  const double misfit =
      (problem.dictionary() * x - problem.observation()).squaredNorm() * problem.noise_precision();
  return misfit + prior;
}

double em_surrogate_value(const HyperparamVector& gamma, const HyperparamVector& gamma_anchor,
                          const ProblemInstance& problem) {
  if (gamma.size() != gamma_anchor.size() || gamma.size() != problem.cols()) {
    throw InputError("surrogate operands must share the dictionary's column count");
  }
  if (gamma.active_indices() != gamma_anchor.active_indices()) {
    throw InputError("surrogate requires gamma and anchor to share one active set");
  }
  EvidenceState at_anchor(problem, gamma_anchor);
  const Vector& sigma = at_anchor.cov_diag();
  double value = at_anchor.log_det_s();
  for (Eigen::Index i : gamma.active_indices()) {
    value += sigma[i] * (1.0 / gamma[i] - 1.0 / gamma_anchor[i]);
    value += std::log(gamma[i]) - std::log(gamma_anchor[i]);
  }
  return value;
}

Matrix theta_space_hessian(const HyperparamVector& gamma, const ProblemInstance& problem) {
  const Eigen::Index n = problem.cols();
  if (n > 64) throw InputError("theta-space Hessian assembly is limited to n <= 64");
  if (gamma.size() != n) throw InputError("gamma length does not match dictionary columns");
  if (gamma.active_count() != n) {
    throw InputError("theta-space Hessian requires strictly positive gamma");
  }
  const Matrix& F = problem.dictionary();
  const double b = problem.noise_variance();
  Matrix s = b * Matrix::Identity(F.rows(), F.rows());
  s.noalias() += F * gamma.values().asDiagonal() * F.transpose();
  Eigen::LLT<Matrix> llt = chol_with_retry(s, "S");
  Matrix x = F;
  Matrix l = llt.matrixL();
  l.triangularView<Eigen::Lower>().solveInPlace(x);
  Matrix z = x.transpose() * x;  // PSD by construction

  const Vector& g = gamma.values();
  Vector g32 = g.array().pow(1.5);
  Matrix h = -4.0 * (g32.asDiagonal() * z.cwiseProduct(z) * g32.asDiagonal());
  h.diagonal() += 6.0 * g.cwiseAbs2().cwiseProduct(z.diagonal());
  return h;
}

Vector stationarity_residual(const HyperparamVector& gamma, const ProblemInstance& problem) {
  EvidenceDerivatives d = evidence_derivatives(gamma, problem);
  return gamma.values().cwiseMin(d.gradient.cwiseAbs());
}

}  // namespace sbl
