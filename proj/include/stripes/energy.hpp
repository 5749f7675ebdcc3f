// Torus energies of a local/nonlocal competition: the critical coupling at
// which the two terms balance, total energies of lattice configurations
// (direct or FFT convolution), the rescaled near-critical form, and the
// slicewise decomposition of the energy into per-direction one-dimensional
// deficit terms plus cross-direction interaction terms, whose sum bounds the
// total from below.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stripes/kernels.hpp"
#include "stripes/lattice.hpp"

namespace stripes {

// Critical coupling of the lattice competition: the half-space moment
//   sum_{y_1 >= 1, y' in Z^(d-1)} y_1 |y|^(-p).
// Certified to within tol (throws tolerance_error when tol cannot be met).
// Requires p >= d + 2; implemented for d in {1, 2}.
double jc_dsc(int d, double p, double tol);

// Critical coupling of the continuum competition, 2 C_q / ((q-1)(q-2)) with
// q = p - d + 1 and C_q = prod_{j=1..d-1} 2/(p-j).  Requires p > d + 1.
double jc_continuum(int d, double p);

enum class ConvPath { Auto, Direct, Fft };

// Total energy per unit volume of a 0/1 configuration at unit spacing:
//   (J * Per - N) / n^d,
// Per the ordered-neighbor-pair perimeter and N the image-summed pair
// interaction sum_{x, y != x} |chi(x) - chi(y)| W(x - y).  W must be the
// periodized Euclidean kernel on the same torus at spacing 1.  The pair sum
// is evaluated through the autocorrelation of the configuration, either
// directly or via FFT (Auto switches on torus size).
double energy_dsc(const TorusConfig& cfg, double J, const PeriodizedKernel& W,
                  ConvPath path = ConvPath::Auto);

// Energy of a spacing-kappa configuration under the near-critical rescaling,
// kappa = tau^(1/beta):
//   tau^(-(p-d)/beta) * [unit-lattice energy at coupling jc_dsc - tau].
// Requires spec.tau > 0 and cfg.spacing == spec.range().
double energy_rescaled_dsc(const TorusConfig& cfg, const KernelSpec& spec);

// Decomposition of the energy per unit volume into a perimeter part, one
// deficit term per direction (the kernel-weighted gap between the first
// moment of the sliced perimeter and the slice overlaps), and one
// cross-direction interaction term per direction.  perimeter_term, g and
// i_cross are extensive (not divided by volume); total, lower_bound and
// residual are per unit volume, with
//   lower_bound = (-perimeter_term + sum_i g[i] + sum_i i_cross[i]) / L^d,
//   residual    = total - lower_bound.
struct EnergyBreakdown {
  double perimeter_term = 0;
  std::vector<double> g;        // one per axis
  std::vector<double> i_cross;  // one per axis
  double total = 0;
  double lower_bound = 0;
  double residual = 0;
};

// Flat (name, value) view with fixed field names: perimeter_term,
// g_1..g_d, i_1..i_d, total, lower_bound, residual.
std::vector<std::pair<std::string, double>> breakdown_fields(
    const EnergyBreakdown& bd);

// Computes the decomposition of cfg's energy under the given kernel.
//   OneNorm family:  continuum energy of the cell union (perimeter counted
//     once per interface facet); at tau = 0 the total and the bound coincide
//     by construction (the direct expression is divergent) and configurations
//     with crossing interfaces carry +inf cross terms.
//   Euclidean family: lattice energy under the near-critical rescaling at
//     the configuration's own spacing (ordered-pair perimeter; tau unused).
// Implemented for d in {1, 2}.
EnergyBreakdown decompose(const TorusConfig& cfg, const KernelSpec& spec);

// Building block of the d = 2 OneNorm decomposition tables, exposed for
// validation: the exact integral, in grid units,
//   int int tent_{j1}(u1) tent_{j2}(u2) (u1 + u2 + cg)^(-p) du1 du2
// over the positive quadrant, where tent_j(u) = max(0, 1 - |u - j|) for
// j >= 1 and tent_0 is the descending half-tent on [0, 1].  Returns +inf
// when the integral diverges (cg = 0 at small offsets).
double hat_pair_integral(double p, double cg, int j1, int j2);

// Kernel-weighted deficit of a single 1D slice,
//   2 * int_0^inf Khat(z) [ J_sl * z - ov(z) ] dz,
// where J_sl is the slice's jump count, ov its displacement overlap, and
// Khat the one-dimensional reduction of the kernel: the integral collapse
// for the OneNorm family (an exact piecewise-linear integral), or the
// transverse lattice-line collapse summed over the displacement lattice
// spacing*Z for the Euclidean family.  `spacing` is that lattice pitch;
// it is required for the Euclidean family (period must be an integer
// multiple) and ignored for OneNorm.  Nonnegative; 0 for jump-free slices.
double g1d_deficit(const Slice1D& sl, const KernelSpec& spec,
                   double spacing = 0);

}  // namespace stripes
