#include "stripes/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace stripes {
namespace {

// Bernoulli numbers B2, B4, B6 divided by (2j)! as used by Euler-Maclaurin.
constexpr double kB2_over_2f = 1.0 / 12.0;
constexpr double kB4_over_4f = -1.0 / 720.0;
constexpr double kB6_over_6f = 1.0 / 30240.0;

double rising(double s, int n) {
  double r = 1;
  for (int i = 0; i < n; ++i) r *= s + i;
  return r;
}

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (s <= 1.0) throw std::invalid_argument("hurwitz_zeta: need s > 1");
  if (a <= 0.0) throw std::invalid_argument("hurwitz_zeta: need a > 0");
  // Push the argument to x = a + N >= threshold, then Euler-Maclaurin.
  const double threshold = std::max(32.0, 2.0 * std::fabs(s));
  double sum = 0;
  double x = a;
  while (x < threshold) {
    sum += std::pow(x, -s);
    x += 1;
  }
  const double xs = std::pow(x, -s);
  sum += xs * x / (s - 1) + 0.5 * xs;
  sum += kB2_over_2f * rising(s, 1) * xs / x;
  sum += kB4_over_4f * rising(s, 3) * xs / (x * x * x);
  sum += kB6_over_6f * rising(s, 5) * xs / (x * x * x * x * x);
  return sum;
}

double zeta(double s) { return hurwitz_zeta(s, 1.0); }

double dirichlet_eta(double s) {
  if (std::fabs(s - 1.0) < 1e-8) {
    // eta(s) = ln2 + (s-1)(gamma ln2 - ln^2(2)/2) + O((s-1)^2)
    const double ln2 = std::log(2.0);
    return ln2 + (s - 1.0) * (kEulerGamma * ln2 - 0.5 * ln2 * ln2);
  }
  if (s > 1.0) return (1.0 - std::pow(2.0, 1.0 - s)) * zeta(s);
  if (!(s > 0.0)) throw std::invalid_argument("dirichlet_eta: need s > 0");
  // Borwein's Chebyshev-accelerated alternating sum; error ~ (3+sqrt8)^(-n).
  const int n = 32;
  std::vector<double> dcoef(n + 1);
  double t = 1.0 / n;
  dcoef[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    t *= 2.0 * (n + i) * (n - i) / ((i + 1.0) * (2.0 * i + 1.0));
    dcoef[i + 1] = dcoef[i] + n * t;
  }
  double sum = 0;
  for (int k = 0; k < n; ++k) {
    const double term = (dcoef[n] - dcoef[k]) * std::pow(k + 1.0, -s);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum / dcoef[n];
}

double digamma(double x) {
  if (x <= 0.0) throw std::invalid_argument("digamma: need x > 0");
  double acc = 0;
  while (x < 24.0) {
    acc -= 1.0 / x;
    x += 1;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  // ln x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6) + 1/(240x^8)
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 -
                 inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
}

double hurwitz_zeta_diff(double s, double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("hurwitz_zeta_diff: need a,b > 0");
  if (!(s > 0.0)) throw std::invalid_argument("hurwitz_zeta_diff: need s > 0");
  const double threshold = std::max(32.0, 2.0 * std::fabs(s));
  double sum = 0;
  double xa = a, xb = b;
  // Advance both arguments in lockstep so the Euler-Maclaurin boundary terms
  // pair up and the s -> 1 divergence cancels explicitly.
  while (xa < threshold || xb < threshold) {
    sum += std::pow(xa, -s) - std::pow(xb, -s);
    xa += 1;
    xb += 1;
  }
  const double pa = std::pow(xa, -s), pb = std::pow(xb, -s);
  // [xa^(1-s) - xb^(1-s)]/(s-1) stably: xb^(1-s) * ln(xb/xa) * expm1(x)/x.
  const double t = (1.0 - s) * std::log(xa / xb);
  sum += std::pow(xb, 1.0 - s) * std::log(xb / xa) * expm1_over_x(t);
  sum += 0.5 * (pa - pb);
  sum += kB2_over_2f * rising(s, 1) * (pa / xa - pb / xb);
  sum += kB4_over_4f * rising(s, 3) * (pa / (xa * xa * xa) - pb / (xb * xb * xb));
  sum += kB6_over_6f * rising(s, 5) *
         (pa / std::pow(xa, 5) - pb / std::pow(xb, 5));
  return sum;
}

PowerChain::PowerChain(double sigma, int max_level)
    : sigma_(sigma), max_level_(max_level) {
  const double nearest = std::round(sigma);
  if (std::fabs(sigma - nearest) < 1e-9 && nearest >= 1 &&
      nearest <= max_level) {
    log_level_ = static_cast<int>(nearest);
    sigma_ = nearest;
  }
  inv_prod_.assign(max_level + 1, 1.0);
  for (int k = 1; k <= max_level; ++k) {
    if (log_level_ >= 0 && k >= log_level_) break;
    inv_prod_[k] = inv_prod_[k - 1] / (sigma_ - k);
  }
  if (log_level_ >= 0) {
    const int m = log_level_;
    log_a_.assign(max_level - m + 1, 0.0);
    log_b_.assign(max_level - m + 1, 0.0);
    double fact = 1;
    for (int j = 1; j < m; ++j) fact *= j;
    log_a_[0] = -1.0 / fact;
    log_b_[0] = 0.0;
    for (int i = 1; i <= max_level - m; ++i) {
      log_a_[i] = -log_a_[i - 1] / i;
      log_b_[i] = (-log_b_[i - 1] - log_a_[i]) / i;
    }
  }
}

double PowerChain::psi(int k, double s) const {
  if (k < 0 || k > max_level_) throw std::logic_error("PowerChain: level out of range");
  if (log_level_ >= 0 && k >= log_level_) {
    const int i = k - log_level_;
    const double ls = std::log(s);
    return std::pow(s, i) * (log_a_[i] * ls + log_b_[i]);
  }
  return std::pow(s, k - sigma_) * inv_prod_[k];
}

namespace {

struct LobattoResult {
  double q7, q4;
};

LobattoResult lobatto_pair(const std::function<double(double)>& f, double a,
                           double b) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  const double s5 = 1.0 / std::sqrt(5.0);
  const double s23 = std::sqrt(2.0 / 3.0);
  const double f1 = f(a), f7 = f(b);
  const double f2 = f(c - s23 * h), f6 = f(c + s23 * h);
  const double f3 = f(c - s5 * h), f5 = f(c + s5 * h);
  const double f4 = f(c);
  LobattoResult r;
  r.q4 = h * ((f1 + f7) / 6.0 + 5.0 / 6.0 * (f3 + f5));
  r.q7 = h * (11.0 / 210.0 * (f1 + f7) + 72.0 / 245.0 * (f2 + f6) +
              125.0 / 294.0 * (f3 + f5) + 16.0 / 35.0 * f4);
  return r;
}

double integrate_rec(const std::function<double(double)>& f, double a,
                     double b, double tol, int depth) {
  const LobattoResult r = lobatto_pair(f, a, b);
  const double err = std::fabs(r.q7 - r.q4);
  if (err <= tol || b - a < 1e-14 * (std::fabs(a) + std::fabs(b) + 1.0)) {
    return r.q7;
  }
  if (depth <= 0) throw tolerance_error("integrate: recursion depth exhausted");
  const double m = 0.5 * (a + b);
  return integrate_rec(f, a, m, 0.5 * tol, depth - 1) +
         integrate_rec(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  return integrate_rec(f, a, b, abs_tol, max_depth);
}

double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  std::vector<double> pts, double abs_tol) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double x, double y) { return std::fabs(x - y) < 1e-15; }),
            pts.end());
  if (pts.size() < 2) return 0.0;
  const double total = pts.back() - pts.front();
  double acc = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double frac = (pts[i + 1] - pts[i]) / total;
    acc += integrate(f, pts[i], pts[i + 1], abs_tol * std::max(frac, 1e-6));
  }
  return acc;
}

unsigned worker_count() {
  if (const char* env = std::getenv("STRIPES_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return static_cast<unsigned>(std::min(v, 64L));
  }
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  return std::min(workers, 8u);
}

}  // namespace stripes
