#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sbl/types.hpp"

namespace sbl::denoise {

// Scalar component problem for an identity dictionary: one observation with
// squared value y_sq and noise variance b. The minimizer and all four update
// rules have closed forms.
struct ScalarProblem {
  double y_sq;
  double b;

  ScalarProblem(double y_sq_in, double b_in);
  double ratio() const { return y_sq / b; }
};

enum class ScalarAlg { Em, Mk, Cb, Sq };

ScalarAlg parse_scalar_alg(const std::string& name);
std::string to_string(ScalarAlg alg);

// above: y_sq > b, below: y_sq < b, boundary: y_sq = b for mk/cb/sq,
// em_above: the em regime covering y_sq >= b at the exact boundary.
enum class Regime { Above, Below, Boundary, EmAbove };

std::string to_string(Regime regime);

struct RateInfo {
  double order = 1.0;
  double rate = 0.0;
  Regime regime = Regime::Above;
};

struct RateEstimate {
  double p_est = 0.0;
  double zeta_est = 0.0;
  int samples = 0;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Raised when the error sequence hits 1e-12 before a 5-ratio window exists.
class WindowTooShortError : public std::runtime_error {
 public:
  explicit WindowTooShortError(const std::string& msg) : std::runtime_error(msg) {}
};

// gamma* = max(y_sq - b, 0).
double closed_form_gamma(const ScalarProblem& problem);

// One exact scalar update of the selected scheme from gamma > 0.
double step_1d(ScalarAlg alg, double gamma, const ScalarProblem& problem);

// gamma^0 .. gamma^iters inclusive.
std::vector<double> trajectory(ScalarAlg alg, double gamma0, const ScalarProblem& problem,
                               int iters);

// Stated order/rate for the scheme in the regime selected by sign(y_sq - b).
RateInfo theoretical_rate(ScalarAlg alg, const ScalarProblem& problem);

// Measures order and rate from the iterate errors e_k = |gamma^k - gamma*|,
// using the last 5 ratios before e_k < 1e-12. zeta_est is the geometric mean
// of e_{k+1}/e_k, except for sq below b where it is the mean of e_{k+1}/e_k^2.
// p_est is the least-squares slope of (ln e_k, ln e_{k+1}) over the window.
RateEstimate empirical_rate(ScalarAlg alg, const ScalarProblem& problem, double gamma0, int iters);

// Sublinear em envelope for y_sq < b: b/(k + b/gamma0) <= gamma^k <= c0/(k + c0/gamma0)
// with c0 = y_sq + b + b^2/(b - y_sq).
Bracket em_bracket_1d(const ScalarProblem& problem, double gamma0, int k);

// cb envelope at y_sq = b: 2b/(k + 2b/gamma0) <= gamma^k <= c0/(k + c0/gamma0)
// with c0 = max(4b, sqrt(2 b gamma0)).
Bracket cb_boundary_bracket(const ScalarProblem& problem, double gamma0, int k);

// sq envelope at y_sq = b: 1/(c0 k + 1/gamma0) <= gamma^k <= 1/((2/b) k + 1/gamma0)
// with c0 = 2/b + gamma0/b^2.
Bracket sq_boundary_bracket(const ScalarProblem& problem, double gamma0, int k);

}  // namespace sbl::denoise
