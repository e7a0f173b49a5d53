#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbl/evidence.hpp"
#include "sbl/types.hpp"
#include "sbl/updates.hpp"

namespace sbl {

enum class Algorithm { Em, Mk, Cb, Amq };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm alg);

struct AlgorithmConfig {
  double tau = 1e-10;
  double epsilon = 0.02;
  double eta0 = 1.0;
  double rel_tol = 1e-3;
  double prune_tol = 1e-12;
  int max_iters = 10000;

  void validate() const;
};

enum class RunStatus { Converged, MaxIters, Diverged, NumericalErrorAbort };

std::string to_string(RunStatus status);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double gamma_rel_change = 0.0;
  Eigen::Index active_count = 0;
  double elapsed_ms = 0.0;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::MaxIters;
  std::string message;

  int iterations() const { return records.empty() ? 0 : records.back().iter; }
  double final_objective() const;
};

struct RunResult {
  HyperparamVector gamma;
  PosteriorMoments moments;
  ConvergenceTrace trace;
  std::optional<AmqState> amq;
};

// Called after each completed iteration with the fresh record and iterate.
using IterationCallback = std::function<void(const IterationRecord&, const HyperparamVector&)>;

// Fixed-point iteration on gamma from gamma0 (strictly positive entries required).
// Each pass computes the posterior, applies the selected update with exact-zero
// pruning of the posterior mean, and stops when the relative gamma change drops
// below rel_tol, the iteration cap is hit, the objective blows up, or a
// factorization fails (the result then carries the last healthy iterate).
RunResult run(Algorithm alg, const ProblemInstance& problem, const HyperparamVector& gamma0,
              const AlgorithmConfig& config = {}, IterationCallback callback = nullptr);

}  // namespace sbl
