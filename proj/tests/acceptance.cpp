// Acceptance gate for the hyperparameter estimation toolkit. Runs every
// numbered criterion, prints one [PASS]/[FAIL] line each, and exits nonzero
// if any failed. Individual requirement failures print as
// [FAIL] file:line message (first 8 per criterion, the rest are counted).
//
// Usage: sbl_acceptance [--only N]

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbl/denoise1d.hpp"
#include "sbl/evidence.hpp"
#include "sbl/experiment.hpp"
#include "sbl/report.hpp"
#include "sbl/runner.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using sbl::Algorithm;
using sbl::HyperparamVector;
using sbl::Matrix;
using sbl::Vector;

int g_criterion_failures = 0;
int g_criteria_failed = 0;

// Always-on requirement: records the failure and keeps going so every
// criterion still reports.
#define REQUIRE(cond, msg)                                                    \
  do {                                                                        \
    if (!(cond)) {                                                            \
      ++g_criterion_failures;                                                 \
      if (g_criterion_failures <= 8) {                                        \
        std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg   \
                  << "\n";                                                    \
      }                                                                       \
    }                                                                         \
  } while (0)

void run_criterion(int number, const std::string& label, double budget_seconds,
                   const std::function<void()>& body, int only) {
  if (only != 0 && only != number) return;
  g_criterion_failures = 0;
  const auto start = Clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    ++g_criterion_failures;
    std::cerr << "[FAIL] criterion " << number << " aborted: " << e.what() << "\n";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0.0 && secs >= budget_seconds) {
    ++g_criterion_failures;
    std::cerr << "[FAIL] criterion " << number << " took " << secs << " s, budget "
              << budget_seconds << " s\n";
  }
  if (g_criterion_failures > 8) {
    std::cerr << "[FAIL] criterion " << number << ": " << (g_criterion_failures - 8)
              << " further requirement failures suppressed\n";
  }
  const bool ok = g_criterion_failures == 0;
  if (!ok) ++g_criteria_failed;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << label << " (" << secs
       << " s)";
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) { return sbl::format_double(v); }

// ---------------------------------------------------------------------------
// 1. Scalar rate table: measured rates match theory in every linear regime,
//    and the squared scheme below b is checked against its stated quadratic
//    order and rate.

void criterion_rates() {
  using namespace sbl::denoise;
  const std::vector<double> rs = {0.25, 0.5, 2.0, 4.0, 20.0};
  for (ScalarAlg alg : {ScalarAlg::Em, ScalarAlg::Mk, ScalarAlg::Cb, ScalarAlg::Sq}) {
    for (double r : rs) {
      ScalarProblem problem(r, 1.0);
      if (r == 2.0) {
        // gamma0 = 1 equals the minimizer, so no ratio window can exist.
        bool threw = false;
        try {
          empirical_rate(alg, problem, 1.0, 2000);
        } catch (const WindowTooShortError&) {
          threw = true;
        }
        REQUIRE(threw, to_string(alg) << " r=2 should flag the empty ratio window");
        continue;
      }
      if (alg == ScalarAlg::Em && r < 1.0) continue;  // sublinear regime

      RateInfo theory = theoretical_rate(alg, problem);
      RateEstimate est = empirical_rate(alg, problem, 1.0, 2000);

      if (alg == ScalarAlg::Sq && r < 1.0) {
        // Context for the quadratic-order claim: the plain last-5 ratio.
        auto traj = trajectory(ScalarAlg::Sq, 1.0, problem, 2000);
        std::vector<double> errors;
        for (double g : traj) {
          if (g < 1e-12) break;
          errors.push_back(g);
        }
        double geo = 1.0;
        for (std::size_t k = errors.size() - 6; k + 1 < errors.size(); ++k) {
          geo *= errors[k + 1] / errors[k];
        }
        geo = std::pow(geo, 0.2);
        std::cerr << "  [info] sq r=" << fmt(r) << ": p_est=" << fmt(est.p_est)
                  << " zeta_est=" << fmt(est.zeta_est)
                  << " (plain per-step ratio over the same window: " << fmt(geo)
                  << " = r^2, i.e. the decay is linear at rate r^2)\n";
        REQUIRE(est.p_est >= 1.9 && est.p_est <= 2.1,
                "sq r=" << fmt(r) << ": p_est=" << fmt(est.p_est) << " outside [1.9, 2.1]");
        REQUIRE(std::abs(est.zeta_est - r * r) <= 0.10 * r * r,
                "sq r=" << fmt(r) << ": zeta_est=" << fmt(est.zeta_est) << " not within 10% of "
                        << fmt(r * r));
        continue;
      }

      REQUIRE(std::abs(est.zeta_est - theory.rate) <= 0.05 * theory.rate,
              to_string(alg) << " r=" << fmt(r) << ": zeta_est=" << fmt(est.zeta_est)
                             << " not within 5% of " << fmt(theory.rate));
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Sublinear envelopes hold through k = 10^4 and the mk boundary iterate
//    matches its closed form to 1e-10.

void criterion_brackets() {
  using namespace sbl::denoise;
  const int k_max = 10000;
  const double slack = 1.0 + 1e-12;

  ScalarProblem below(0.5, 1.0);
  auto em_traj = trajectory(ScalarAlg::Em, 1.0, below, k_max);
  for (int k = 0; k <= k_max; ++k) {
    Bracket br = em_bracket_1d(below, 1.0, k);
    const double g = em_traj[static_cast<std::size_t>(k)];
    REQUIRE(br.lower <= g * slack && g <= br.upper * slack,
            "em bracket violated at k=" << k << ": " << fmt(br.lower) << " <= " << fmt(g)
                                        << " <= " << fmt(br.upper));
  }

  ScalarProblem boundary(1.0, 1.0);
  auto mk_traj = trajectory(ScalarAlg::Mk, 1.0, boundary, k_max);
  double mk_worst = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    mk_worst = std::max(mk_worst,
                        std::abs(mk_traj[static_cast<std::size_t>(k)] - 1.0 / (k + 1.0)));
  }
  REQUIRE(mk_worst <= 1e-10,
          "mk boundary drift " << fmt(mk_worst) << " exceeds 1e-10 over k <= 10000");

  auto cb_traj = trajectory(ScalarAlg::Cb, 1.0, boundary, k_max);
  auto sq_traj = trajectory(ScalarAlg::Sq, 1.0, boundary, k_max);
  for (int k = 0; k <= k_max; ++k) {
    Bracket cb = cb_boundary_bracket(boundary, 1.0, k);
    const double gc = cb_traj[static_cast<std::size_t>(k)];
    REQUIRE(cb.lower <= gc * slack && gc <= cb.upper * slack,
            "cb bracket violated at k=" << k << ": " << fmt(cb.lower) << " <= " << fmt(gc)
                                        << " <= " << fmt(cb.upper));
    Bracket sq = sq_boundary_bracket(boundary, 1.0, k);
    const double gs = sq_traj[static_cast<std::size_t>(k)];
    REQUIRE(sq.lower <= gs * slack && gs <= sq.upper * slack,
            "sq bracket violated at k=" << k << ": " << fmt(sq.lower) << " <= " << fmt(gs)
                                        << " <= " << fmt(sq.upper));
  }
}

// ---------------------------------------------------------------------------
// 3. Fast posterior path vs the dense oracle and finite differences on 100
//    seeded random instances.

void criterion_oracle_equivalence() {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::RandomInstance inst = oracle::random_instance(rng);
    sbl::ProblemInstance problem(inst.f, inst.y, inst.beta);
    HyperparamVector gamma(inst.gamma);

    const double fast_l = sbl::evidence_objective(gamma, problem);
    const double slow_l = oracle::objective(problem, inst.gamma);
    REQUIRE(oracle::close(fast_l, slow_l, 1e-8),
            "objective mismatch on trial " << trial << ": " << fmt(fast_l) << " vs "
                                           << fmt(slow_l));

    sbl::PosteriorMoments moments = sbl::posterior_moments(gamma, problem);
    const Vector mean_ref = oracle::mean(problem, inst.gamma);
    const Vector cov_ref = oracle::cov_diag(problem, inst.gamma);
    sbl::EvidenceDerivatives derivs = sbl::evidence_derivatives(gamma, problem);
    const Vector grad_ref = oracle::gradient(problem, inst.gamma);
    const Vector grad_fd = oracle::fd_gradient(problem, inst.gamma);
    for (Eigen::Index i = 0; i < inst.gamma.size(); ++i) {
      REQUIRE(oracle::close(moments.mean[i], mean_ref[i], 1e-8),
              "mean[" << i << "] mismatch on trial " << trial);
      REQUIRE(oracle::close(moments.cov_diag[i], cov_ref[i], 1e-8),
              "cov_diag[" << i << "] mismatch on trial " << trial);
      REQUIRE(oracle::close(derivs.gradient[i], grad_ref[i], 1e-8),
              "gradient[" << i << "] mismatch on trial " << trial);
      if (inst.gamma[i] > 0.0) {
        REQUIRE(oracle::close(derivs.gradient[i], grad_fd[i], 1e-5),
                "finite-difference gradient[" << i << "] mismatch on trial " << trial << ": "
                                              << fmt(derivs.gradient[i]) << " vs "
                                              << fmt(grad_fd[i]));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 4. The posterior mean attains the quadratic data term: the penalized least
//    squares value at mu equals y^T S^-1 y, on the same 100 instances.

void criterion_mean_attains_quadratic() {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::RandomInstance inst = oracle::random_instance(rng);
    sbl::ProblemInstance problem(inst.f, inst.y, inst.beta);
    HyperparamVector gamma(inst.gamma);
    sbl::PosteriorMoments moments = sbl::posterior_moments(gamma, problem);
    const double aux = sbl::auxiliary_objective(moments.mean, gamma, problem);
    Matrix s = oracle::s_matrix(problem, inst.gamma);
    const double quad = inst.y.dot(s.ldlt().solve(inst.y));
    REQUIRE(oracle::close(aux, quad, 1e-8), "aux value " << fmt(aux) << " vs quadratic term "
                                                         << fmt(quad) << " on trial " << trial);
  }
}

// ---------------------------------------------------------------------------
// 5. em and cb never increase the objective on 20 seeded partial-DCT runs.

void criterion_monotone_descent() {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Matrix f = sbl::gen_dictionary(sbl::DictionaryKind::PartialDct, 32, 64);
    Vector x = sbl::gen_sparse_signal(64, 10.0, seed);
    auto [y, beta] = sbl::gen_observation(f, x, sbl::NoiseSpec::beta(1.0), seed);
    sbl::ProblemInstance problem(f, y, beta);
    for (Algorithm alg : {Algorithm::Em, Algorithm::Cb}) {
      auto result = sbl::run(alg, problem, HyperparamVector::ones(64));
      const auto& rec = result.trace.records;
      for (std::size_t k = 1; k < rec.size(); ++k) {
        REQUIRE(rec[k].objective <=
                    rec[k - 1].objective + 1e-10 * (1.0 + std::abs(rec[k - 1].objective)),
                sbl::to_string(alg) << " seed " << seed << " objective rose at iter "
                                    << rec[k].iter << ": " << fmt(rec[k - 1].objective) << " -> "
                                    << fmt(rec[k].objective));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 6. With tau = 1e-300, epsilon = 0, eta0 = 1 on the 64-point identity
//    problem, the quadratic scheme reproduces the scalar squared recurrence
//    componentwise to 1e-10 over 50 iterations.

void criterion_unit_step_reduction() {
  const Eigen::Index n = 64;
  Vector y = 2.0 * sbl::gen_sparse_signal(n, 75.0, 3);
  sbl::ProblemInstance problem(Matrix::Identity(n, n), y, 1.0);

  sbl::AlgorithmConfig config;
  config.tau = 1e-300;
  config.epsilon = 0.0;
  config.eta0 = 1.0;
  config.rel_tol = 1e-250;
  config.max_iters = 50;

  std::vector<Vector> iterates;
  sbl::run(Algorithm::Amq, problem, HyperparamVector::ones(n), config,
           [&](const sbl::IterationRecord&, const HyperparamVector& g) {
             iterates.push_back(g.values());
           });
  REQUIRE(iterates.size() >= 2, "no iterations recorded");

  Vector g = Vector::Ones(n);
  for (std::size_t k = 1; k < iterates.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (g[i] == 0.0) continue;
      const double mean = g[i] * y[i] / (g[i] + 1.0);
      double next = mean == 0.0 ? 0.0 : oracle::sq_1d(y[i] * y[i], 1.0, g[i]);
      if (next <= 1e-12) next = 0.0;
      g[i] = next;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      REQUIRE(std::abs(iterates[k][i] - g[i]) <= 1e-10,
              "component " << i << " diverged from the scalar recurrence at iter " << k << ": "
                           << fmt(iterates[k][i]) << " vs " << fmt(g[i]));
    }
  }
}

// ---------------------------------------------------------------------------
// 7. The squared-coordinate hessian of the log determinant is bounded by
//    (18/5) Gamma on 50 seeded instances.

void criterion_hessian_bound() {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::RandomInstance inst = oracle::random_instance(rng, 8, 8, 0.0);
    sbl::ProblemInstance problem(inst.f, inst.y, inst.beta);
    Matrix h = sbl::theta_space_hessian(HyperparamVector(inst.gamma), problem);
    Matrix bound = (18.0 / 5.0) * inst.gamma.asDiagonal() * Matrix::Identity(h.rows(), h.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(bound - h);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-8,
            "trial " << trial << ": min eigenvalue " << fmt(eig.eigenvalues().minCoeff())
                     << " below -1e-8");
  }
}

// ---------------------------------------------------------------------------
// 8. The em surrogate upper-bounds log det S on 50 pairs per instance,
//    10 instances.

void criterion_em_majorant() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Eigen::Index> m_dist(2, 12);
  std::uniform_int_distribution<Eigen::Index> n_dist(2, 10);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 5.0);

  for (int instance = 0; instance < 10; ++instance) {
    const Eigen::Index m = m_dist(rng);
    const Eigen::Index n = n_dist(rng);
    Matrix f(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) f(i, j) = normal(rng);
    }
    Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) y[i] = normal(rng);
    sbl::ProblemInstance problem(f, y, 0.5 + unif(rng));

    for (int pair = 0; pair < 50; ++pair) {
      Vector gamma(n), anchor(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        gamma[i] = unif(rng);
        anchor[i] = unif(rng);
      }
      const double surrogate =
          sbl::em_surrogate_value(HyperparamVector(gamma), HyperparamVector(anchor), problem);
      Matrix s = oracle::s_matrix(problem, gamma);
      Eigen::PartialPivLU<Matrix> lu(s);
      const double log_det = lu.matrixLU().diagonal().array().abs().log().sum();
      REQUIRE(surrogate >= log_det - 1e-9 * (1.0 + std::abs(log_det)),
              "instance " << instance << " pair " << pair << ": surrogate " << fmt(surrogate)
                          << " below log det " << fmt(log_det));
    }
  }
}

// ---------------------------------------------------------------------------
// 9. The quadratic scheme lands on a stationary point of the denoising
//    preset: min(gamma_i, |gradient_i|) small for at least 99% of indices.

void criterion_stationarity() {
  const Eigen::Index n = 512;
  Vector x = sbl::gen_sparse_signal(n, 10.0, 1);
  auto [y, beta] = sbl::gen_observation(Matrix::Identity(n, n), x, sbl::NoiseSpec::beta(10.0), 1);
  sbl::ProblemInstance problem(Matrix::Identity(n, n), y, beta);

  sbl::AlgorithmConfig config;
  config.max_iters = 2000;
  auto result = sbl::run(Algorithm::Amq, problem, HyperparamVector::ones(n), config);
  REQUIRE(result.trace.status == sbl::RunStatus::Converged,
          "denoising run ended " << sbl::to_string(result.trace.status));

  const Vector residual = sbl::stationarity_residual(result.gamma, problem);
  const double l_final = result.trace.final_objective();
  const double threshold = 1e-2 * (1.0 + std::abs(l_final) / static_cast<double>(n));
  const Eigen::Index good = (residual.array() <= threshold).count();
  REQUIRE(static_cast<double>(good) >= 0.99 * static_cast<double>(n),
          "only " << good << " of " << n << " indices satisfy the stationarity bound "
                  << fmt(threshold));
}

// ---------------------------------------------------------------------------
// 10. On both preset grids every cell terminates and the quadratic scheme
//     reaches its own final objective level at least as fast as em in 5 of
//     the 6 panels.

int plateau_iteration(const sbl::ConvergenceTrace& trace, double rel_tol) {
  const double l_final = trace.records.back().objective;
  for (const auto& rec : trace.records) {
    if (std::abs(rec.objective - l_final) <= rel_tol * (1.0 + std::abs(l_final))) {
      return rec.iter;
    }
  }
  return trace.records.back().iter;
}

void check_panel_race(const std::string& preset) {
  const auto start = Clock::now();
  sbl::ExperimentSpec spec = sbl::preset_spec(preset, 1);
  auto results = sbl::run_matrix(spec);

  std::map<std::string, std::map<Algorithm, int>> panels;
  for (const auto& cell : results) {
    REQUIRE(cell.failure.empty(), cell.name << " failed: " << cell.failure);
    if (!cell.failure.empty()) continue;
    REQUIRE(cell.trace.status == sbl::RunStatus::Converged ||
                cell.trace.status == sbl::RunStatus::MaxIters,
            cell.name << " ended " << sbl::to_string(cell.trace.status));
    std::ostringstream key;
    key << "s" << cell.sparsity_percent << "_" << cell.noise.label();
    panels[key.str()][cell.algorithm] = plateau_iteration(cell.trace, spec.rel_tol);
  }

  REQUIRE(panels.size() == 6, preset << " produced " << panels.size() << " panels, expected 6");
  int won = 0;
  std::ostringstream table;
  for (const auto& [key, algs] : panels) {
    const int amq = algs.at(Algorithm::Amq);
    const int em = algs.at(Algorithm::Em);
    if (amq <= em) ++won;
    table << "  [info] " << preset << " " << key << ": amq " << amq << " vs em " << em << "\n";
  }
  std::cerr << table.str();
  REQUIRE(won >= 5, preset << ": amq plateaued no later than em in only " << won
                           << " of 6 panels");

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  REQUIRE(secs < 120.0, preset << " family took " << secs << " s, budget 120 s");
}

void criterion_panel_races() {
  check_panel_race("denoise-grid");
  check_panel_race("dct-grid");
}

// ---------------------------------------------------------------------------
// 11. On the tau sweep, iterations to stopping are non-decreasing in tau
//     within each panel (ties allowed).

void criterion_tau_monotonicity() {
  sbl::ExperimentSpec spec = sbl::preset_spec("dct-tau-sweep", 1);
  auto results = sbl::run_matrix(spec);

  std::map<std::string, std::map<double, std::pair<int, double>>> panels;
  for (const auto& cell : results) {
    REQUIRE(cell.failure.empty(), cell.name << " failed: " << cell.failure);
    if (!cell.failure.empty()) continue;
    std::ostringstream key;
    key << "s" << cell.sparsity_percent << "_" << cell.noise.label();
    panels[key.str()][cell.tau] = {cell.trace.iterations(), cell.trace.final_objective()};
  }

  for (const auto& [key, by_tau] : panels) {
    std::ostringstream iters, finals;
    int prev = -1;
    bool monotone = true;
    for (const auto& [tau, entry] : by_tau) {
      iters << (prev < 0 ? "" : ", ") << "tau=" << fmt(tau) << ": " << entry.first;
      finals << (prev < 0 ? "" : ", ") << fmt(entry.second);
      if (prev >= 0 && entry.first < prev) monotone = false;
      prev = entry.first;
    }
    // The damping that grows with tau shrinks each step, so the relative
    // change stop can trip earlier at a tighter tau even though the final
    // objective consistently degrades as tau grows (see finals below).
    std::cerr << "  [info] panel " << key << " iterations { " << iters.str()
              << " } final objectives { " << finals.str() << " }\n";
    REQUIRE(monotone,
            "panel " << key << ": iterations to stop are not non-decreasing in tau: "
                     << iters.str());
  }
  REQUIRE(panels.size() == 6, "expected 6 panels, found " << panels.size());
}

// ---------------------------------------------------------------------------
// 12. Rerunning a spec with the same seed writes byte-identical files.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_determinism() {
  sbl::ExperimentSpec spec = sbl::preset_spec("denoise-grid", 1);
  const fs::path base = fs::temp_directory_path() / "sbl_acceptance_determinism";
  const fs::path first = base / "a";
  const fs::path second = base / "b";
  fs::remove_all(base);
  fs::create_directories(first);
  fs::create_directories(second);

  sbl::write_results(first.string(), spec, sbl::run_matrix(spec, 1));
  sbl::write_results(second.string(), spec, sbl::run_matrix(spec, 4));

  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const fs::path other = second / entry.path().filename();
    REQUIRE(fs::exists(other), entry.path().filename() << " missing from the rerun");
    if (!fs::exists(other)) continue;
    REQUIRE(slurp(entry.path()) == slurp(other),
            entry.path().filename() << " differs between reruns");
    ++compared;
  }
  REQUIRE(compared == 25, "expected 24 cell files plus the manifest, compared " << compared);
  fs::remove_all(base);
}

// ---------------------------------------------------------------------------
// 13. The high-dimensional synthetic analog (m=122, n=16384) terminates
//     within budget and the quadratic scheme plateaus no later than em.

void criterion_eeg_analog() {
  sbl::ExperimentSpec spec = sbl::preset_spec("eeg-analog", 1);
  auto results = sbl::run_matrix(spec);

  std::map<Algorithm, int> plateau;
  for (const auto& cell : results) {
    REQUIRE(cell.failure.empty(), cell.name << " failed: " << cell.failure);
    if (!cell.failure.empty()) continue;
    REQUIRE(cell.trace.status == sbl::RunStatus::Converged ||
                cell.trace.status == sbl::RunStatus::MaxIters,
            cell.name << " ended " << sbl::to_string(cell.trace.status));
    plateau[cell.algorithm] = plateau_iteration(cell.trace, spec.rel_tol);
    std::cerr << "  [info] " << cell.name << ": status "
              << sbl::to_string(cell.trace.status) << ", plateau at iteration "
              << plateau[cell.algorithm] << "\n";
  }
  REQUIRE(plateau.count(Algorithm::Amq) == 1 && plateau.count(Algorithm::Em) == 1,
          "missing amq or em cell");
  if (plateau.count(Algorithm::Amq) == 1 && plateau.count(Algorithm::Em) == 1) {
    REQUIRE(plateau[Algorithm::Amq] <= plateau[Algorithm::Em],
            "amq plateaued at " << plateau[Algorithm::Amq] << ", em at "
                                << plateau[Algorithm::Em]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: sbl_acceptance [--only N]\n";
      return 0;
    } else {
      std::cerr << "unknown argument '" << arg << "'\n";
      return 1;
    }
  }

  run_criterion(1, "scalar rates match theory in every stated regime", 1.0, criterion_rates,
                only);
  run_criterion(2, "sublinear envelopes hold through k = 10000", 1.0, criterion_brackets, only);
  run_criterion(3, "fast path matches the dense oracle and finite differences", 5.0,
                criterion_oracle_equivalence, only);
  run_criterion(4, "the posterior mean attains the quadratic data term", 0.0,
                criterion_mean_attains_quadratic, only);
  run_criterion(5, "em and cb descend monotonically on partial-dct instances", 0.0,
                criterion_monotone_descent, only);
  run_criterion(6, "unit-step quadratic scheme equals the scalar squared recurrence", 0.0,
                criterion_unit_step_reduction, only);
  run_criterion(7, "squared-coordinate hessian obeys the 18/5 gamma bound", 0.0,
                criterion_hessian_bound, only);
  run_criterion(8, "em surrogate majorizes the log determinant", 0.0, criterion_em_majorant,
                only);
  run_criterion(9, "quadratic scheme reaches stationarity on the denoising preset", 0.0,
                criterion_stationarity, only);
  run_criterion(10, "amq plateaus no later than em on at least 5 of 6 panels per family", 240.0,
                criterion_panel_races, only);
  run_criterion(11, "iterations to stop are non-decreasing in tau", 0.0,
                criterion_tau_monotonicity, only);
  run_criterion(12, "experiment reruns are byte-identical", 0.0, criterion_determinism, only);
  run_criterion(13, "high-dimensional analog terminates with amq ahead of em", 600.0,
                criterion_eeg_analog, only);

  if (g_criteria_failed == 0) {
    std::cout << "acceptance: all criteria passed" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << g_criteria_failed << " criteria failed" << std::endl;
  return 1;
}
