#pragma once

#include "sbl/types.hpp"

namespace sbl {

// State threaded through the trust-region quadratic scheme: theta_i = gamma_i^(-1/2)
// on the active set (0 elsewhere), the current blend step size, and the latest
// unblended half step.
struct AmqState {
  Vector theta;
  double eta = 1.0;
  Vector half_step;
};

// gamma_i+ = mu_i^2 + Sigma_ii on the active set.
HyperparamVector em_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol = 1e-12);

// gamma_i+ = gamma_i mu_i^2 / (gamma_i - Sigma_ii). A non-positive denominator
// prunes the index; a denominator below prune_tol * gamma_i is floored there.
HyperparamVector mk_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol = 1e-12);

// gamma_i+ = gamma_i sqrt(mu_i^2 / (gamma_i - Sigma_ii)), same denominator policy as mk.
HyperparamVector cb_update(const PosteriorMoments& moments, const HyperparamVector& gamma,
                           double prune_tol = 1e-12);

// Unblended quadratic half step gamma_i^(1/2) = gamma_i ((x_i^2 + tau) / (gamma_i^2 Z_ii + tau))^2
// over the active set; inactive entries stay 0.
Vector amq_half_step(const Vector& z_diag, const Vector& x, const HyperparamVector& gamma,
                     double tau);
Vector amq_half_step(const EvidenceDerivatives& derivs, const Vector& x,
                     const HyperparamVector& gamma, double tau);

// Blend in theta space: theta+ = theta + eta (theta_half - theta), returned as
// gamma+ = theta+^(-2). eta = 1 returns the half step verbatim; a zero half step
// prunes the index.
HyperparamVector amq_blend(const HyperparamVector& gamma, const Vector& half_step, double eta,
                           double prune_tol = 1e-12);

// eta+ = eta (1 - epsilon eta).
double step_size_next(double eta, double epsilon);

}  // namespace sbl
