// One-dimensional continuum stripe energies under the reduced kernel
// cq (c + |z|)^(-q): the per-length energy of periodic interval unions, the
// infinite alternating-stripe energy density with analytic width
// derivatives, the optimal stripe width, the segment-wise chessboard lower
// bound, and localized window energies that partition the total.
#pragma once

#include "stripes/kernels.hpp"
#include "stripes/overlap1d.hpp"

namespace stripes {

// Energy per unit length of the periodic interval union on a circle of
// circumference `period`: minus the jump count plus the kernel-weighted
// moment deficit, divided by the period.  Trivial sets (empty / full
// circle) have energy 0.  Finite at vanishing smoothing (tau = 0) because
// the deficit vanishes identically near zero displacement.
double f1_energy(const IntervalSet& set, double period, const KernelSpec& spec);

// A(h) = sum_{m>=1} (-1)^(m+1) Psi2(m h), the alternating series of the
// second kernel antiderivative Psi2(t) = cq (c+t)^(2-q) / ((q-1)(q-2)) at
// the interface spacings of the infinite stripe pattern; closed via
// alternating Hurwitz zeta values.  The stripe energy density is
//   e(h) = -1/h + (2/h) A(h).
double a_tau(double h, const KernelSpec& spec);

struct ATauDerivatives {
  double a;    // A(h)
  double da;   // A'(h)
  double d2a;  // A''(h)
};

// A(h) together with its first two width derivatives (exact series
// closures, no finite differencing).
ATauDerivatives a_tau_derivatives(double h, const KernelSpec& spec);

// Energy density of the infinite alternating stripe pattern of width h,
// and its first two derivatives in h.
double e_inf_tau(double h, const KernelSpec& spec);
double e_inf_tau_d1(double h, const KernelSpec& spec);
double e_inf_tau_d2(double h, const KernelSpec& spec);

struct StripeOptimum {
  double h_star;             // minimizing stripe width
  double c_star;             // effective constant: (e + 1/h) h^(q-1) at h*
  double second_derivative;  // e''(h_star), positive at a proper minimum
  double bracket_lo;         // final sign-change bracket around h_star
  double bracket_hi;
};

// Global minimizer of e_inf_tau over widths in [1e-2, 1e4]: scans for all
// descending-to-ascending sign changes of e', bisects each, and returns the
// lowest-energy root.  Throws std::domain_error when no interior minimum
// exists in the window (e.g. when the kernel moment drops below the jump
// cost and arbitrarily thin stripes win).
StripeOptimum optimal_h(const KernelSpec& spec);

// Reflection (chessboard) lower bound: every maximal run of length l,
// occupied or empty, is charged the periodic stripe density e_inf_tau(l);
// the length-weighted average bounds f1_energy from below.  Sets without
// jumps get 0.
double chessboard_bound(const IntervalSet& set, double period,
                        const KernelSpec& spec);

// Localized energy content of the window [w0, w1): minus the window's jump
// count plus its kernel-weighted share of the deficit.  Windows that
// partition the circle sum to period * f1_energy exactly.  The window may
// be given unwrapped (w1 - w0 <= period).  At tau = 0 a jump lying exactly
// on a window boundary makes the localized integral diverge
// (std::domain_error).
double r_tau_window(const IntervalSet& set, double period,
                    const KernelSpec& spec, double w0, double w1);

}  // namespace stripes
