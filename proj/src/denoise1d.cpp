#include "sbl/denoise1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbl::denoise {

ScalarProblem::ScalarProblem(double y_sq_in, double b_in) : y_sq(y_sq_in), b(b_in) {
  if (!(y_sq >= 0.0) || !std::isfinite(y_sq)) throw InputError("y_sq must be finite and >= 0");
  if (!(b > 0.0) || !std::isfinite(b)) throw InputError("b must be finite and > 0");
}

ScalarAlg parse_scalar_alg(const std::string& name) {
  if (name == "em") return ScalarAlg::Em;
  if (name == "mk") return ScalarAlg::Mk;
  if (name == "cb") return ScalarAlg::Cb;
  if (name == "sq") return ScalarAlg::Sq;
  throw InputError("unknown scalar algorithm '" + name + "' (expected em, mk, cb, or sq)");
}

std::string to_string(ScalarAlg alg) {
  switch (alg) {
    case ScalarAlg::Em: return "em";
    case ScalarAlg::Mk: return "mk";
    case ScalarAlg::Cb: return "cb";
    case ScalarAlg::Sq: return "sq";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Above: return "above";
    case Regime::Below: return "below";
    case Regime::Boundary: return "boundary";
    case Regime::EmAbove: return "em_above";
  }
  return "unknown";
}

double closed_form_gamma(const ScalarProblem& problem) {
  return std::max(problem.y_sq - problem.b, 0.0);
}

double step_1d(ScalarAlg alg, double gamma, const ScalarProblem& problem) {
  if (!(gamma > 0.0)) throw InputError("step_1d requires gamma > 0");
  const double y2 = problem.y_sq;
  const double b = problem.b;
  const double d = b + gamma;
  switch (alg) {
    case ScalarAlg::Em: {
      const double w = gamma / d;
      return y2 * w * w + b * w;
    }
    case ScalarAlg::Mk:
      return y2 * gamma / d;
    case ScalarAlg::Cb:
      return gamma * std::sqrt(y2 / d);
    case ScalarAlg::Sq: {
      const double w = y2 / d;
      return gamma * w * w;
    }
  }
  throw InputError("unhandled scalar algorithm");
}

std::vector<double> trajectory(ScalarAlg alg, double gamma0, const ScalarProblem& problem,
                               int iters) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (iters < 0) throw InputError("iters must be non-negative");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(iters) + 1);
  out.push_back(gamma0);
  double g = gamma0;
  for (int k = 0; k < iters; ++k) {
    if (g <= 0.0) break;  // mk maps gamma to 0 exactly when y_sq = 0
    g = step_1d(alg, g, problem);
    out.push_back(g);
  }
  return out;
}

RateInfo theoretical_rate(ScalarAlg alg, const ScalarProblem& problem) {
  const double y2 = problem.y_sq;
  const double b = problem.b;
  const bool above = y2 > b;
  const bool boundary = y2 == b;

  switch (alg) {
    case ScalarAlg::Em:
      if (above) return {1.0, b * (2.0 * y2 - b) / (y2 * y2), Regime::Above};
      if (boundary) return {1.0, 1.0, Regime::EmAbove};
      return {1.0, 1.0, Regime::Below};
    case ScalarAlg::Mk:
      if (above) return {1.0, b / y2, Regime::Above};
      if (boundary) return {1.0, 1.0, Regime::Boundary};
      return {1.0, y2 / b, Regime::Below};
    case ScalarAlg::Cb:
      if (above) return {1.0, (b + y2) / (2.0 * y2), Regime::Above};
      if (boundary) return {1.0, 1.0, Regime::Boundary};
      return {1.0, std::sqrt(y2 / b), Regime::Below};
    case ScalarAlg::Sq:
      if (above) return {1.0, std::abs(2.0 * b / y2 - 1.0), Regime::Above};
      if (boundary) return {1.0, 1.0, Regime::Boundary};
      return {2.0, (y2 / b) * (y2 / b), Regime::Below};
  }
  throw InputError("unhandled scalar algorithm");
}

RateEstimate empirical_rate(ScalarAlg alg, const ScalarProblem& problem, double gamma0,
                            int iters) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (iters < 1) throw InputError("iters must be at least 1");
  const double star = closed_form_gamma(problem);
  constexpr double kFloor = 1e-12;

  std::vector<double> errors;
  double g = gamma0;
  for (int k = 0; k <= iters; ++k) {
    const double e = std::abs(g - star);
    if (e < kFloor) break;
    errors.push_back(e);
    if (k < iters) g = step_1d(alg, g, problem);
  }

  const int ratio_count = static_cast<int>(errors.size()) - 1;
  if (ratio_count < 5) {
    std::ostringstream os;
    os << "error sequence hit the 1e-12 floor after " << std::max(ratio_count, 0)
       << " usable ratios; 5 are required";
    throw WindowTooShortError(os.str());
  }

  const size_t begin = errors.size() - 6;  // last 5 ratios use 6 error values
  const bool quadratic = alg == ScalarAlg::Sq && problem.y_sq < problem.b;

  double zeta;
  if (quadratic) {
    double sum = 0.0;
    for (size_t k = begin; k + 1 < errors.size(); ++k) {
      sum += errors[k + 1] / (errors[k] * errors[k]);
    }
    zeta = sum / 5.0;
  } else {
    double log_sum = 0.0;
    for (size_t k = begin; k + 1 < errors.size(); ++k) {
      log_sum += std::log(errors[k + 1] / errors[k]);
    }
    zeta = std::exp(log_sum / 5.0);
  }

  // Least-squares slope of ln e_{k+1} against ln e_k over the window.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t k = begin; k + 1 < errors.size(); ++k) {
    const double x = std::log(errors[k]);
    const double y = std::log(errors[k + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = 5.0 * sxx - sx * sx;
  const double p_est = denom != 0.0 ? (5.0 * sxy - sx * sy) / denom : 1.0;

  return {p_est, zeta, ratio_count};
}

Bracket em_bracket_1d(const ScalarProblem& problem, double gamma0, int k) {
  if (!(problem.y_sq < problem.b)) throw InputError("em bracket requires y_sq < b");
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (k < 0) throw InputError("k must be non-negative");
  const double b = problem.b;
  const double c0 = problem.y_sq + b + b * b / (b - problem.y_sq);
  return {b / (k + b / gamma0), c0 / (k + c0 / gamma0)};
}

Bracket cb_boundary_bracket(const ScalarProblem& problem, double gamma0, int k) {
  if (problem.y_sq != problem.b) throw InputError("cb boundary bracket requires y_sq = b");
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (k < 0) throw InputError("k must be non-negative");
  const double b = problem.b;
  const double c0 = std::max(4.0 * b, std::sqrt(2.0 * b * gamma0));
  return {2.0 * b / (k + 2.0 * b / gamma0), c0 / (k + c0 / gamma0)};
}

Bracket sq_boundary_bracket(const ScalarProblem& problem, double gamma0, int k) {
  if (problem.y_sq != problem.b) throw InputError("sq boundary bracket requires y_sq = b");
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (k < 0) throw InputError("k must be non-negative");
  const double b = problem.b;
  const double c0 = 2.0 / b + gamma0 / (b * b);
  return {1.0 / (c0 * k + 1.0 / gamma0), 1.0 / ((2.0 / b) * k + 1.0 / gamma0)};
}

}  // namespace sbl::denoise
