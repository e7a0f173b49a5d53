#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad caller input: dimension mismatches, invalid config values, unparseable
// files. Maps to CLI exit code 1.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: factorization failure after the jitter retry,
// divergence detected mid-solve. Maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The linear model y = F x + noise with known noise precision beta.
// Immutable once built; derived caches are computed eagerly so const
// instances can be shared across threads.
class ProblemInstance {
 public:
  ProblemInstance(Matrix dictionary, Vector observation, double noise_precision);

  const Matrix& dictionary() const { return dictionary_; }
  const Vector& observation() const { return observation_; }
  double noise_precision() const { return noise_precision_; }
  double noise_variance() const { return 1.0 / noise_precision_; }
  Eigen::Index rows() const { return dictionary_.rows(); }
  Eigen::Index cols() const { return dictionary_.cols(); }

  // True when the dictionary is exactly the identity matrix; solves then use
  // closed-form diagonal expressions.
  bool is_identity() const { return is_identity_; }

  // F^T F, cached for dictionaries up to kGramCacheMaxCols columns.
  bool has_gram() const { return gram_.size() > 0; }
  const Matrix& gram() const { return gram_; }
  // Squared column norms of F (the diagonal of F^T F), always cached.
  const Vector& column_sq_norms() const { return column_sq_norms_; }
  // F^T y, always cached.
  const Vector& dictionary_t_obs() const { return dictionary_t_obs_; }

  static constexpr Eigen::Index kGramCacheMaxCols = 1024;

 private:
  Matrix dictionary_;
  Vector observation_;
  double noise_precision_;
  bool is_identity_;
  Matrix gram_;
  Vector column_sq_norms_;
  Vector dictionary_t_obs_;
};

// Nonnegative prior variances; an exact zero marks a pruned index. The active
// set is always {i : gamma_i > 0}.
class HyperparamVector {
 public:
  explicit HyperparamVector(Vector gamma);
  static HyperparamVector ones(Eigen::Index n);

  Eigen::Index size() const { return gamma_.size(); }
  const Vector& values() const { return gamma_; }
  double operator[](Eigen::Index i) const { return gamma_[i]; }
  bool is_active(Eigen::Index i) const { return gamma_[i] > 0.0; }
  const std::vector<Eigen::Index>& active_indices() const { return active_; }
  Eigen::Index active_count() const { return static_cast<Eigen::Index>(active_.size()); }

  // Monotone pruning step: inactive indices stay zero, candidate entries at or
  // below prune_tol become zero, everything else is taken as-is. Non-finite
  // candidates abort the run.
  HyperparamVector apply_update(const Vector& candidate, double prune_tol) const;

 private:
  Vector gamma_;
  std::vector<Eigen::Index> active_;
};

// Posterior N(mean, Sigma) of the weights given gamma. Only the diagonal of
// Sigma is kept on the fast path; the brute-force path fills full_cov.
struct PosteriorMoments {
  Vector mean;
  Vector cov_diag;
  bool has_full_cov = false;
  Matrix full_cov;
};

// diag(Z), u, and the evidence gradient Z_ii - u_i^2. All three are full
// length-n vectors: entries at pruned indices are still computed from the
// full dictionary column so the gradient stays meaningful there.
struct EvidenceDerivatives {
  Vector z_diag;
  Vector u;
  Vector gradient;
};

enum class SolveMode { Fast, Oracle };

}  // namespace sbl
