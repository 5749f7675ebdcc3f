// Shared numeric utilities: Euler-Maclaurin accelerated series (zeta, Hurwitz
// zeta, digamma), stable paired Hurwitz differences, power-law antiderivative
// chains with logarithmic fallbacks at integer exponents, and an adaptive
// Lobatto quadrature used by verification oracles.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stripes {

// Raised when a certified tolerance cannot be met.
struct tolerance_error : std::runtime_error {
  explicit tolerance_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Hurwitz zeta, sum_{k>=0} (k+a)^(-s), for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

// Riemann zeta for real s > 1.
double zeta(double s);

// Dirichlet eta, sum_{k>=1} (-1)^(k-1) k^(-s), for s > 0; stable through
// s = 1.
double dirichlet_eta(double s);

// Digamma function for x > 0.
double digamma(double x);

// hurwitz_zeta(s,a) - hurwitz_zeta(s,b), computed with paired tails so the
// result stays finite and accurate for all s > 0, through and below the
// s = 1 pole of the individual values (analytic continuation on s < 1).
double hurwitz_zeta_diff(double s, double a, double b);

// expm1(x)/x with the x -> 0 limit handled.
inline double expm1_over_x(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 + x / 2.0 + x * x / 6.0;
  return std::expm1(x) / x;
}

// Iterated antiderivatives of the power kernel s^(-sigma) with the sign
// convention psi_0(s) = s^(-sigma), d/ds psi_k = -psi_{k-1}.  For k < sigma
// these equal the "integrate to +infinity" tails.  When sigma is an integer
// m <= k the chain turns logarithmic; values at k >= m are then only
// meaningful inside zero-weight stencils (constants drop out).
class PowerChain {
 public:
  PowerChain(double sigma, int max_level);
  double psi(int k, double s) const;
  double sigma() const { return sigma_; }

 private:
  double sigma_ = 0;
  int max_level_ = 0;
  int log_level_ = -1;           // integer m with sigma == m, or -1
  std::vector<double> inv_prod_; // 1/prod_{j=1..k}(sigma-j) for generic levels
  std::vector<double> log_a_, log_b_; // s^i (a ln s + b) coefficients
};

// Adaptive Lobatto quadrature (4-point Lobatto with 7-point extension).
// Splits recursively until the local error estimate is below tol scaled by
// the subinterval fraction.  Throws tolerance_error if the recursion depth
// is exhausted before convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

// Same, with the interval pre-split at the given interior breakpoints
// (useful when the integrand has kinks at known locations).
double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  std::vector<double> pts, double abs_tol);

// Worker threads used by the parallel sweeps: the STRIPES_WORKERS
// environment variable when set to a positive integer, otherwise the
// hardware concurrency, capped at 8 and never below 1.
unsigned worker_count();

}  // namespace stripes
