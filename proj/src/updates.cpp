#include "sbl/updates.hpp"

#include <cmath>
#include <sstream>

namespace sbl {

namespace {

void check_moments(const PosteriorMoments& moments, const HyperparamVector& gamma) {
  if (moments.mean.size() != gamma.size() || moments.cov_diag.size() != gamma.size()) {
    throw InputError("posterior moments do not match gamma length");
  }
}

// Shared mk/cb denominator handling: gamma_i - Sigma_ii with pruning on
// non-positive values and a floor at prune_tol * gamma_i otherwise.
double guarded_denominator(double gamma_i, double sigma_ii, double prune_tol) {
  const double raw = gamma_i - sigma_ii;
  if (raw <= 0.0) return 0.0;
  const double floor = prune_tol * gamma_i;
  return raw < floor ? floor : raw;
}

}  // namespace

HyperparamVector em_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol) {
  check_moments(moments, gamma);
  Vector next = Vector::Zero(gamma.size());
  for (Eigen::Index i : gamma.active_indices()) {
    next[i] = moments.mean[i] * moments.mean[i] + moments.cov_diag[i];
  }
  return gamma.apply_update(next, prune_tol);
}

HyperparamVector mk_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol) {
  check_moments(moments, gamma);
  Vector next = Vector::Zero(gamma.size());
  for (Eigen::Index i : gamma.active_indices()) {
    const double denom = guarded_denominator(gamma[i], moments.cov_diag[i], prune_tol);
    if (denom == 0.0) continue;
    next[i] = gamma[i] * moments.mean[i] * moments.mean[i] / denom;
  }
  return gamma.apply_update(next, prune_tol);
}

HyperparamVector cb_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol) {
  check_moments(moments, gamma);
  Vector next = Vector::Zero(gamma.size());
  for (Eigen::Index i : gamma.active_indices()) {
    const double denom = guarded_denominator(gamma[i], moments.cov_diag[i], prune_tol);
    if (denom == 0.0) continue;
    next[i] = gamma[i] * std::sqrt(moments.mean[i] * moments.mean[i] / denom);
  }
  return gamma.apply_update(next, prune_tol);
}

Vector amq_half_step(const Vector& z_diag, const Vector& x, const HyperparamVector& gamma,
                     double tau) {
  if (z_diag.size() != gamma.size() || x.size() != gamma.size()) {
    throw InputError("half step operands do not match gamma length");
  }
  if (tau < 0.0) throw InputError("tau must be non-negative");
  Vector half = Vector::Zero(gamma.size());
  for (Eigen::Index i : gamma.active_indices()) {
    const double num = x[i] * x[i] + tau;
    const double den = gamma[i] * gamma[i] * z_diag[i] + tau;
    if (den == 0.0) {
      if (num == 0.0) continue;  // 0/0 at tau = 0 resolves to a pruned index
      std::ostringstream os;
      os << "half step denominator vanished at index " << i << " with nonzero numerator";
      throw NumericalError(os.str());
    }
    const double ratio = num / den;
    half[i] = gamma[i] * ratio * ratio;
  }
  return half;
}

Vector amq_half_step(const EvidenceDerivatives& derivs, const Vector& x,
                     const HyperparamVector& gamma, double tau) {
  return amq_half_step(derivs.z_diag, x, gamma, tau);
}

HyperparamVector amq_blend(const HyperparamVector& gamma, const Vector& half_step, double eta,
                           double prune_tol) {
  if (half_step.size() != gamma.size()) {
    throw InputError("half step length does not match gamma");
  }
  if (!(eta > 0.0) || eta > 1.0) throw InputError("eta must lie in (0, 1]");
  Vector next = Vector::Zero(gamma.size());
  for (Eigen::Index i : gamma.active_indices()) {
    const double h = half_step[i];
    if (h < 0.0 || !std::isfinite(h)) {
      std::ostringstream os;
      os << "half step entry " << i << " is invalid: " << h;
      throw NumericalError(os.str());
    }
    if (eta == 1.0) {
      next[i] = h;
      continue;
    }
    if (h == 0.0) continue;  // theta_half = +inf pulls the index to 0
    const double theta = 1.0 / std::sqrt(gamma[i]);
    const double theta_half = 1.0 / std::sqrt(h);
    const double theta_next = theta + eta * (theta_half - theta);
    next[i] = 1.0 / (theta_next * theta_next);
  }
  return gamma.apply_update(next, prune_tol);
}

double step_size_next(double eta, double epsilon) {
  if (!(eta > 0.0) || eta > 1.0) throw InputError("eta must lie in (0, 1]");
  if (epsilon < 0.0 || epsilon >= 1.0) throw InputError("epsilon must lie in [0, 1)");
  return eta * (1.0 - epsilon * eta);
}

}  // namespace sbl
