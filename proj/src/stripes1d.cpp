// One-dimensional continuum stripe energies: interval-union energies via
// exact kernel-weighted integrals, the alternating-series stripe density
// with closed-form derivatives, width optimization, the chessboard bound,
// and localized window energies.
#include "stripes/stripes1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stripes/numerics.hpp"

namespace stripes {

namespace {

// sum_{m>=1} (-1)^(m+1) (m+a)^(-s) for s > 0, a >= 0, via the stable
// Hurwitz zeta difference (finite through s = 1).
double alt_zeta(double s, double a) {
  return std::pow(2.0, -s) *
         hurwitz_zeta_diff(s, (1 + a) / 2, (2 + a) / 2);
}

// Membership flip points of a normalized interval set on the circle; the
// pair joined across 0 for wrapping sets is not a flip.
std::vector<double> jump_points(const IntervalSet& norm, double period) {
  std::vector<double> pts;
  if (norm.empty()) return pts;
  const double tol = 1e-12 * period;
  if (measure(norm) >= period - tol) return pts;  // full circle
  const bool wrap =
      norm.front().first < tol && norm.back().second > period - tol;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    if (!(wrap && i == 0)) pts.push_back(norm[i].first);
    if (!(wrap && i + 1 == norm.size())) pts.push_back(norm[i].second);
  }
  return pts;
}

// J z - ov(z) on the breakpoints of ov (deficit of the displacement moment).
PiecewiseLinear moment_deficit(const PiecewiseLinear& ov, double jumps) {
  PiecewiseLinear d;
  d.x = ov.x;
  d.y.resize(ov.y.size());
  for (std::size_t i = 0; i < ov.x.size(); ++i)
    d.y[i] = jumps * ov.x[i] - ov.y[i];
  return d;
}

struct EDerivs {
  double e, de, d2e;
};

EDerivs e_derivs(double h, const KernelSpec& spec) {
  const ATauDerivatives a = a_tau_derivatives(h, spec);
  EDerivs out;
  out.e = -1 / h + 2 * a.a / h;
  out.de = (1 + 2 * (h * a.da - a.a)) / (h * h);
  out.d2e = (-2 + 4 * a.a) / (h * h * h) - 4 * a.da / (h * h) +
            2 * a.d2a / h;
  return out;
}

}  // namespace

double f1_energy(const IntervalSet& set, double period,
                 const KernelSpec& spec) {
  if (!(period > 0)) throw std::invalid_argument("f1_energy: period <= 0");
  const IntervalSet norm = normalize_intervals(set, period);
  const std::vector<double> jumps = jump_points(norm, period);
  if (jumps.empty()) return 0;
  const double j = static_cast<double>(jumps.size());
  const PiecewiseLinear ov = overlap_function(norm, period);
  const double g = 2 * kernel_weighted_integral(moment_deficit(ov, j),
                                                j * period, spec.q(),
                                                spec.range(), spec.cq());
  return (-j + g) / period;
}

ATauDerivatives a_tau_derivatives(double h, const KernelSpec& spec) {
  if (!(h > 0)) throw std::invalid_argument("a_tau: width must be positive");
  const double q = spec.q();
  const double c = spec.range();
  const double cq = spec.cq();
  const double a = c / h;
  const double e0 = alt_zeta(q - 2, a);
  const double e1 = alt_zeta(q - 1, a);
  const double e2 = alt_zeta(q, a);
  ATauDerivatives out;
  out.a = 2 * cq / ((q - 1) * (q - 2)) * std::pow(h, 2 - q) * e0;
  out.da = -2 * cq / (q - 1) * std::pow(h, 1 - q) * (e0 - a * e1);
  out.d2a = 2 * cq * std::pow(h, -q) * (e0 - 2 * a * e1 + a * a * e2);
  return out;
}

double a_tau(double h, const KernelSpec& spec) {
  return a_tau_derivatives(h, spec).a;
}

double e_inf_tau(double h, const KernelSpec& spec) {
  return e_derivs(h, spec).e;
}

double e_inf_tau_d1(double h, const KernelSpec& spec) {
  return e_derivs(h, spec).de;
}

double e_inf_tau_d2(double h, const KernelSpec& spec) {
  return e_derivs(h, spec).d2e;
}

StripeOptimum optimal_h(const KernelSpec& spec) {
  const double lo = 1e-2, hi = 1e4;
  const int per_decade = 25;
  const int steps =
      static_cast<int>(std::ceil(per_decade * std::log10(hi / lo)));
  std::vector<std::pair<double, double>> brackets;  // e' < 0 -> e' > 0
  double hprev = lo;
  double fprev = e_derivs(hprev, spec).de;
  for (int i = 1; i <= steps; ++i) {
    const double h = lo * std::pow(hi / lo, static_cast<double>(i) / steps);
    const double f = e_derivs(h, spec).de;
    if (fprev < 0 && f >= 0) brackets.emplace_back(hprev, h);
    hprev = h;
    fprev = f;
  }
  if (brackets.empty())
    throw std::domain_error(
        "optimal_h: no interior stripe-width minimum in [1e-2, 1e4]");
  StripeOptimum best{};
  double best_e = 0;
  bool have = false;
  for (auto [bl, bh] : brackets) {
    double l = bl, r = bh;
    for (int it = 0; it < 200 && r - l > 4e-16 * r; ++it) {
      const double mid = 0.5 * (l + r);
      (e_derivs(mid, spec).de < 0 ? l : r) = mid;
    }
    const double h = 0.5 * (l + r);
    const EDerivs ed = e_derivs(h, spec);
    if (!have || ed.e < best_e) {
      have = true;
      best_e = ed.e;
      best.h_star = h;
      best.c_star = (ed.e + 1 / h) * std::pow(h, spec.q() - 1);
      best.second_derivative = ed.d2e;
      best.bracket_lo = bl;
      best.bracket_hi = bh;
    }
  }
  return best;
}

double chessboard_bound(const IntervalSet& set, double period,
                        const KernelSpec& spec) {
  if (!(period > 0))
    throw std::invalid_argument("chessboard_bound: period <= 0");
  const IntervalSet norm = normalize_intervals(set, period);
  const std::vector<double> jumps = jump_points(norm, period);
  if (jumps.empty()) return 0;
  std::vector<double> pts = jumps;
  std::sort(pts.begin(), pts.end());
  double bound = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double len = (i + 1 < pts.size() ? pts[i + 1] : pts[0] + period) -
                       pts[i];
    if (len > 0) bound += len * e_inf_tau(len, spec);
  }
  return bound / period;
}

double r_tau_window(const IntervalSet& set, double period,
                    const KernelSpec& spec, double w0, double w1) {
  if (!(period > 0))
    throw std::invalid_argument("r_tau_window: period <= 0");
  if (!(w1 > w0) || w1 - w0 > period * (1 + 1e-12))
    throw std::invalid_argument("r_tau_window: bad window");
  const IntervalSet norm = normalize_intervals(set, period);
  const std::vector<double> jumps = jump_points(norm, period);
  const double wtol = 1e-12 * period;
  double jw = 0;
  for (double e : jumps) {
    double rel = std::fmod(e - w0, period);
    if (rel < 0) rel += period;
    if (rel < w1 - w0 - wtol) jw += 1;
  }
  const PiecewiseLinear up = windowed_overlap(norm, period, w0, w1, 1);
  const PiecewiseLinear um = windowed_overlap(norm, period, w0, w1, -1);
  // merge breakpoints; the half-sum of the two one-sided window overlaps is
  // the window's share of the displacement disagreement
  std::vector<double> xs = up.x;
  xs.insert(xs.end(), um.x.begin(), um.x.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [&](double a, double b) { return b - a < wtol; }),
           xs.end());
  PiecewiseLinear d;
  d.x = xs;
  d.y.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    d.y[i] = jw * xs[i] - 0.5 * (up(xs[i]) + um(xs[i]));
  const double g = 2 * kernel_weighted_integral(d, jw * period, spec.q(),
                                                spec.range(), spec.cq());
  return -jw + g;
}

}  // namespace stripes
