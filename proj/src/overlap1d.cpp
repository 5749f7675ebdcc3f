// Interval geometry and exact kernel-weighted integrals for 1D periodic sets.
#include "stripes/overlap1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stripes/numerics.hpp"

namespace stripes {

namespace {

double reduce_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  // Values within rounding of the period wrap to 0.
  if (period - r < 1e-12 * period) r = 0;
  return r;
}

}  // namespace

IntervalSet normalize_intervals(IntervalSet raw, double period) {
  IntervalSet parts;
  for (auto [a, b] : raw) {
    if (!(b > a)) continue;
    if (b - a >= period) return {{0.0, period}};
    double ra = reduce_mod(a, period);
    double rb = ra + (b - a);
    if (rb <= period) {
      parts.emplace_back(ra, rb);
    } else {
      parts.emplace_back(ra, period);
      parts.emplace_back(0.0, rb - period);
    }
  }
  std::sort(parts.begin(), parts.end());
  IntervalSet out;
  for (auto& iv : parts) {
    if (!out.empty() && iv.first <= out.back().second + 1e-12 * period)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

IntervalSet slice_intervals(const Slice1D& sl) {
  if (sl.jumps.empty()) {
    if (sl.starts_inside) return {{0.0, sl.period}};
    return {};
  }
  IntervalSet raw;
  if (sl.starts_inside) {
    // Inside on [0, jumps[0]) and between odd/even jump pairs, wrapping.
    raw.emplace_back(sl.jumps.back(), sl.jumps.front() + sl.period);
    for (std::size_t i = 1; i + 1 < sl.jumps.size(); i += 2)
      raw.emplace_back(sl.jumps[i], sl.jumps[i + 1]);
  } else {
    for (std::size_t i = 0; i + 1 < sl.jumps.size(); i += 2)
      raw.emplace_back(sl.jumps[i], sl.jumps[i + 1]);
  }
  return normalize_intervals(raw, sl.period);
}

double measure(const IntervalSet& a) {
  double m = 0;
  for (auto [x, y] : a) m += y - x;
  return m;
}

double intersection_measure(const IntervalSet& a, const IntervalSet& b) {
  double m = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].first, b[j].first);
    double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) m += hi - lo;
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return m;
}

IntervalSet shift_intervals(const IntervalSet& a, double delta, double period) {
  IntervalSet raw;
  raw.reserve(a.size());
  for (auto [x, y] : a) raw.emplace_back(x + delta, y + delta);
  return normalize_intervals(raw, period);
}

double PiecewiseLinear::operator()(double t) const {
  if (x.empty()) return 0;
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

namespace {

std::vector<double> endpoint_list(const IntervalSet& set) {
  std::vector<double> e;
  e.reserve(2 * set.size());
  for (auto [a, b] : set) {
    e.push_back(a);
    e.push_back(b);
  }
  return e;
}

std::vector<double> sorted_unique(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double t : v)
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  return out;
}

}  // namespace

PiecewiseLinear overlap_function(const IntervalSet& set, double period) {
  std::vector<double> ends = endpoint_list(set);
  std::vector<double> cand = {0.0, period};
  for (double e : ends)
    for (double f : ends) cand.push_back(reduce_mod(e - f, period));
  cand.push_back(period);
  cand = sorted_unique(std::move(cand), 1e-12 * period);
  if (cand.back() < period) cand.push_back(period);
  PiecewiseLinear out;
  double mE = measure(set);
  for (double z : cand) {
    IntervalSet shifted = shift_intervals(set, -z, period);
    out.x.push_back(z);
    out.y.push_back(2 * (mE - intersection_measure(set, shifted)));
  }
  return out;
}

PiecewiseLinear windowed_overlap(const IntervalSet& set, double period,
                                 double w0, double w1, int sign) {
  if (!(w1 >= w0) || w1 - w0 > period * (1 + 1e-12))
    throw std::invalid_argument("windowed_overlap: bad window");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("windowed_overlap: sign must be +-1");
  IntervalSet window = normalize_intervals({{w0, w1}}, period);
  std::vector<double> ends = endpoint_list(set);
  std::vector<double> wends = endpoint_list(window);
  std::vector<double> cand = {0.0, period};
  for (double e : ends) {
    for (double f : ends) cand.push_back(reduce_mod(sign * (e - f), period));
    for (double f : wends) cand.push_back(reduce_mod(sign * (e - f), period));
  }
  cand = sorted_unique(std::move(cand), 1e-12 * period);
  if (cand.back() < period) cand.push_back(period);
  PiecewiseLinear out;
  double base = intersection_measure(set, window);
  for (double z : cand) {
    IntervalSet shifted = shift_intervals(set, -sign * z, period);
    double ms = intersection_measure(shifted, window);
    // |A sym B| cap W = |A cap W| + |B cap W| - 2 |A cap B cap W|.
    IntervalSet both;
    std::size_t i = 0, j = 0;
    while (i < set.size() && j < shifted.size()) {
      double lo = std::max(set[i].first, shifted[j].first);
      double hi = std::min(set[i].second, shifted[j].second);
      if (hi > lo) both.emplace_back(lo, hi);
      if (set[i].second < shifted[j].second)
        ++i;
      else
        ++j;
    }
    out.x.push_back(z);
    out.y.push_back(base + ms - 2 * intersection_measure(both, window));
  }
  return out;
}

double kernel_weighted_integral(const PiecewiseLinear& f, double growth,
                                double q, double c, double cq) {
  if (f.x.size() < 2) return 0;
  if (!(q > 2)) throw std::invalid_argument("kernel_weighted_integral: q <= 2");
  if (c < 0) throw std::invalid_argument("kernel_weighted_integral: c < 0");
  double L = f.x.back() - f.x.front();
  if (!(L > 0)) return 0;
  if (std::abs(f.x.front()) > 1e-12 * L)
    throw std::invalid_argument("kernel_weighted_integral: domain must start at 0");
  double total = 0;
  for (std::size_t j = 0; j + 1 < f.x.size(); ++j) {
    double x0 = f.x[j], x1 = f.x[j + 1];
    if (!(x1 > x0)) continue;
    double beta = (f.y[j + 1] - f.y[j]) / (x1 - x0);
    double alpha = f.y[j] - beta * x0;
    double a = (c + x0) / L;
    double b = (c + x1) / L;
    double ca = alpha - beta * c;           // coefficient of sum over psi1
    double cb = growth - beta * L;          // coefficient of k-weighted sum
    double cc = beta * (q - 1);             // coefficient of sum over psi2
    double s_a, s_b, s_c;
    double l1 = std::pow(L, 1 - q) / (q - 1);
    double l2 = std::pow(L, 2 - q) / ((q - 1) * (q - 2));
    if (a > 0) {
      s_a = l1 * hurwitz_zeta_diff(q - 1, a, b);
      s_c = l2 * hurwitz_zeta_diff(q - 2, a, b);
      s_b = l1 * (hurwitz_zeta_diff(q - 2, a, b) - a * hurwitz_zeta(q - 1, a) +
                  b * hurwitz_zeta(q - 1, b));
      total += ca * s_a + cb * s_b + cc * s_c;
    } else {
      // Piece touching z = 0 with c = 0: finite only if f vanishes there.
      double scale = 0;
      for (double v : f.y) scale = std::max(scale, std::abs(v));
      scale = std::max(scale, std::abs(growth));
      if (std::abs(f.y[j]) > 1e-9 * scale ||
          std::abs(f.y[j + 1]) > 1e-9 * scale)
        throw std::domain_error(
            "kernel_weighted_integral: divergent integral (kernel "
            "singularity meets nonzero integrand at 0)");
      // Only the per-period growth survives; sum over the k >= 1 images.
      cb = growth;
      s_b = l1 * (hurwitz_zeta_diff(q - 2, 1.0, 1.0 + b) +
                  b * hurwitz_zeta(q - 1, 1.0 + b));
      total += cb * s_b;
    }
  }
  return cq * total;
}

double khat_abs_moment(double q, double c, double cq) {
  if (!(c > 0))
    throw std::domain_error("khat_abs_moment: requires a positive kernel range");
  return 2 * cq * std::pow(c, 2 - q) / ((q - 1) * (q - 2));
}

}  // namespace stripes
