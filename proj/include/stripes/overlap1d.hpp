// Exact one-dimensional overlap geometry and kernel-weighted integrals.
//
// Periodic 1D sets are interval unions; the displacement overlaps
//   ov(z)   = |E  symdiff  (E - z)| on [0, L)
//   U_w(z)  = |(E symdiff (E -/+ z)) intersect window|
// are piecewise linear in z with kinks only where interval endpoints align,
// so they are tabulated exactly.  Integrals of piecewise-linear functions
// (with optional linear growth per period) against the reduced kernel
// cq * (c + z)^(-q) over [0, inf) reduce to Hurwitz zeta values.
#pragma once

#include <utility>
#include <vector>

#include "stripes/lattice.hpp"

namespace stripes {

// Sorted disjoint subintervals of [0, L); wrapping sets are split at 0.
using IntervalSet = std::vector<std::pair<double, double>>;

// Sorts, reduces mod L, splits wrapping intervals, merges overlaps.
IntervalSet normalize_intervals(IntervalSet raw, double period);

// Interval union of a slice (jump/parity form).
IntervalSet slice_intervals(const Slice1D& sl);

double measure(const IntervalSet& a);
double intersection_measure(const IntervalSet& a, const IntervalSet& b);
// Set shifted by delta on the circle of circumference period.
IntervalSet shift_intervals(const IntervalSet& a, double delta, double period);

// Continuous piecewise-linear function on [x.front(), x.back()].
struct PiecewiseLinear {
  std::vector<double> x;  // sorted breakpoints
  std::vector<double> y;
  double operator()(double t) const;
};

// ov(z) on [0, L]; exact, L-periodic (ov(0) = ov(L) = 0).
PiecewiseLinear overlap_function(const IntervalSet& set, double period);

// U(z) = |(E symdiff (E - sign*z)) intersect [w0, w1]| on z in [0, L];
// exact, L-periodic in z.  The window may be given in unwrapped coordinates
// (w1 - w0 <= L).
PiecewiseLinear windowed_overlap(const IntervalSet& set, double period,
                                 double w0, double w1, int sign);

// Integral over [0, inf) of cq (c+z)^(-q) f(z) dz, where f extends the
// tabulated base function by f(z + k L) = f(z) + k * growth (L = base
// domain length).  Exact via Hurwitz zeta image sums.  Throws
// std::domain_error when c = 0 and f does not vanish on a neighborhood of 0
// (genuinely divergent integral).
double kernel_weighted_integral(const PiecewiseLinear& f, double growth,
                                double q, double c, double cq);

// Integral over R of |z| cq (c+z)^(-q) dz = 2 cq c^(2-q) / ((q-1)(q-2));
// requires c > 0.
double khat_abs_moment(double q, double c, double cq);

}  // namespace stripes
