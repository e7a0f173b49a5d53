#include "sbl/runner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace sbl {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "em") return Algorithm::Em;
  if (name == "mk") return Algorithm::Mk;
  if (name == "cb") return Algorithm::Cb;
  if (name == "amq") return Algorithm::Amq;
  throw InputError("unknown algorithm '" + name + "' (expected em, mk, cb, or amq)");
}

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::Em: return "em";
    case Algorithm::Mk: return "mk";
    case Algorithm::Cb: return "cb";
    case Algorithm::Amq: return "amq";
  }
  return "unknown";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max_iters";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::NumericalErrorAbort: return "numerical_error";
  }
  return "unknown";
}

void AlgorithmConfig::validate() const {
  if (!(tau >= 0.0)) throw InputError("tau must be non-negative");
  if (!(epsilon >= 0.0) || epsilon >= 1.0) throw InputError("epsilon must lie in [0, 1)");
  if (!(eta0 > 0.0) || eta0 > 1.0) throw InputError("eta0 must lie in (0, 1]");
  if (!(rel_tol > 0.0)) throw InputError("rel_tol must be positive");
  if (!(prune_tol >= 0.0)) throw InputError("prune_tol must be non-negative");
  if (max_iters < 1) throw InputError("max_iters must be at least 1");
}

double ConvergenceTrace::final_objective() const {
  return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().objective;
}

namespace {

// Zero gamma wherever the posterior mean is exactly zero, then apply the
// usual pruning threshold. Keeps the mk/cb/amq ratios well defined.
HyperparamVector prune_with_mean(const HyperparamVector& gamma, const Vector& candidate,
                                 const Vector& mean, double prune_tol) {
  Vector adjusted = candidate;
  for (Eigen::Index i : gamma.active_indices()) {
    if (mean[i] == 0.0) adjusted[i] = 0.0;
  }
  return gamma.apply_update(adjusted, prune_tol);
}

double rel_change(const HyperparamVector& prev, const HyperparamVector& next) {
  const double denom = std::max(prev.values().norm(), 1e-300);
  return (next.values() - prev.values()).norm() / denom;
}

}  // namespace

RunResult run(Algorithm alg, const ProblemInstance& problem, const HyperparamVector& gamma0,
              const AlgorithmConfig& config, IterationCallback callback) {
  config.validate();
  if (gamma0.size() != problem.cols()) {
    throw InputError("gamma0 length does not match dictionary columns");
  }
  if (gamma0.active_count() != gamma0.size()) {
    throw InputError("gamma0 must be strictly positive");
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  RunResult result{gamma0, PosteriorMoments{}, ConvergenceTrace{}, std::nullopt};
  std::optional<AmqState> amq;
  if (alg == Algorithm::Amq) {
    Vector theta = Vector::Zero(gamma0.size());
    for (Eigen::Index i : gamma0.active_indices()) theta[i] = 1.0 / std::sqrt(gamma0[i]);
    amq = AmqState{theta, config.eta0, Vector::Zero(gamma0.size())};
  }

  auto state = std::make_unique<EvidenceState>(problem, gamma0);
  result.trace.records.push_back({0, state->objective(), 0.0, gamma0.active_count(), elapsed_ms()});
  if (callback) callback(result.trace.records.back(), gamma0);

  HyperparamVector gamma = gamma0;
  double prev_objective = state->objective();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    HyperparamVector next = gamma;
    try {
      const Vector& mean = state->mean();
      switch (alg) {
        case Algorithm::Em: {
          PosteriorMoments moments{mean, state->cov_diag(), false, Matrix()};
          next = prune_with_mean(gamma, em_update(moments, gamma, config.prune_tol).values(), mean,
                                 config.prune_tol);
          break;
        }
        case Algorithm::Mk: {
          PosteriorMoments moments{mean, state->cov_diag(), false, Matrix()};
          next = prune_with_mean(gamma, mk_update(moments, gamma, config.prune_tol).values(), mean,
                                 config.prune_tol);
          break;
        }
        case Algorithm::Cb: {
          PosteriorMoments moments{mean, state->cov_diag(), false, Matrix()};
          next = prune_with_mean(gamma, cb_update(moments, gamma, config.prune_tol).values(), mean,
                                 config.prune_tol);
          break;
        }
        case Algorithm::Amq: {
          Vector half = amq_half_step(state->z_diag_active(), mean, gamma, config.tau);
          amq->half_step = half;
          HyperparamVector blended = amq_blend(gamma, half, amq->eta, config.prune_tol);
          next = prune_with_mean(gamma, blended.values(), mean, config.prune_tol);
          amq->eta = step_size_next(amq->eta, config.epsilon);
          amq->theta = Vector::Zero(next.size());
          for (Eigen::Index i : next.active_indices()) amq->theta[i] = 1.0 / std::sqrt(next[i]);
          break;
        }
      }
      state = std::make_unique<EvidenceState>(problem, next);
    } catch (const NumericalError& err) {
      result.trace.records.push_back({iter, std::numeric_limits<double>::quiet_NaN(),
                                      rel_change(gamma, next), next.active_count(), elapsed_ms()});
      result.trace.status = RunStatus::NumericalErrorAbort;
      result.trace.message = err.what();
      result.gamma = gamma;
      result.moments = posterior_moments(gamma, problem);
      result.amq = amq;
      return result;
    }

    const double objective = state->objective();
    const double rel = rel_change(gamma, next);
    gamma = next;
    result.trace.records.push_back({iter, objective, rel, gamma.active_count(), elapsed_ms()});
    if (callback) callback(result.trace.records.back(), gamma);

    if (!std::isfinite(objective) || objective - prev_objective > 1e3 * (1.0 + std::abs(prev_objective))) {
      result.trace.status = RunStatus::Diverged;
      std::ostringstream os;
      os << "objective jumped from " << prev_objective << " to " << objective << " at iteration "
         << iter;
      result.trace.message = os.str();
      break;
    }
    prev_objective = objective;

    if (rel < config.rel_tol) {
      result.trace.status = RunStatus::Converged;
      break;
    }
    if (iter == config.max_iters) result.trace.status = RunStatus::MaxIters;
  }

  result.gamma = gamma;
  result.moments = state->moments();
  result.amq = amq;
  return result;
}

}  // namespace sbl
