// Local window diagnostics on the torus: per-jump window costs r, cross-
// direction disagreement integrals v and w, the per-cube window energy
// F-bar whose average over cube centers reproduces the decomposition lower
// bound exactly, the L1 distance to axis-aligned stripe families with a
// minimum-gap constraint, the region labeling built from that distance, a
// checkerboard refinement report, and a fitted-constant inequality report.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stripes/energy.hpp"
#include "stripes/kernels.hpp"
#include "stripes/lattice.hpp"

namespace stripes {

// Axis-aligned cube [center - side/2, center + side/2) per axis, positions
// taken modulo the torus side.
struct Cube {
  std::vector<double> center;  // d entries
  double side = 0;
};

// Window energy of one cube, split per direction into the jump part r, the
// neighbor-window cross part v, and the volume cross part w; all entries are
// normalized by the cube volume, so f_bar[i] = r_sum[i] + v_sum[i] + w_int[i]
// and f_bar_total is the sum over directions.  v_sum and w_int are
// nonnegative; at tau = 0 a configuration with crossing interfaces carries
// +inf cross parts.
struct LocalEnergy {
  std::vector<double> cube_center;
  double side = 0;
  std::vector<double> r_sum;
  std::vector<double> v_sum;
  std::vector<double> w_int;
  std::vector<double> f_bar;
  double f_bar_total = 0;
};

// Computes the window energy of the cell union of cfg inside the cube under
// the smoothed 1-norm kernel (OneNorm family, matching dimension; side in
// (0, torus side]).  Averaging the result over any full residue lattice of
// cube centers with pitch spacing/2 reproduces decompose(cfg, spec)
// .lower_bound exactly.  Implemented for d in {1, 2}.
LocalEnergy local_energy(const TorusConfig& cfg, const Cube& cube,
                         const KernelSpec& spec);

// Distance of cfg to unions of stripes constant in every coordinate except
// `axis`, with all stripe boundaries pairwise at least eta apart:
//   (1/side^d) inf_F integral over the cube of |chi_cfg - chi_F|.
// The infimum is taken over families whose boundaries lie on the global
// spacing/2 grid (a finite dynamic program; exact whenever eta is a multiple
// of spacing/2, a documented restriction otherwise).  Empty and full sets
// are admissible, so the distance is at most min(volume fraction inside,
// outside).
double stripe_distance(const TorusConfig& cfg, const Cube& cube, int axis,
                       double eta);

// min over axes of stripe_distance.
double stripe_distance_min(const TorusConfig& cfg, const Cube& cube,
                           double eta);

// Parameters of the region decomposition: cube side l, boundary gap eta,
// closeness threshold delta, dilation radius rho of the far-from-stripes
// region, and the energy gate m recorded for report consumers (not used in
// the labeling).
struct RegionParams {
  double l = 0;
  double eta = 0;
  double delta = 0;
  double rho = 0;
  double m = 0;
};

// Per-cell labels: -1 where two distinct directions are delta-close to
// stripes (dilated by 1 in the sup norm), 0 where no direction is
// delta-close (dilated by rho), and k in 1..d for the unique delta-close
// direction e_k otherwise.  Labels partition the torus cells.
struct RegionMap {
  int d = 1;
  int n = 0;
  double spacing = 1;
  RegionParams params;
  std::vector<std::int8_t> labels;  // n^d entries, row-major

  std::size_t count(int label) const;
};

// Labels every cell center. Requires torus side > l and positive l, eta,
// delta; rho >= 0.  The kernel spec only fixes dimension bookkeeping; labels
// depend on cfg alone.
RegionMap region_decompose(const TorusConfig& cfg, const RegionParams& params,
                           const KernelSpec& spec);

// '-', '0', '1', ... for labels -1, 0, 1, ...
char region_label_char(int label);

// Grid-format serialization: header "d n kappa", then label-character rows.
void write_region_map(const RegionMap& map, std::ostream& out);
void write_region_map_file(const RegionMap& map, const std::string& path);

// One refinement level of the checkerboard comparison: the alternating
// pattern of single cells at pitch kappa, its total energy per unit volume,
// and the summed cross term per unit volume.
struct CheckerboardLevel {
  double kappa = 1;
  int n = 0;
  double total = 0;
  double cross = 0;
};

// Checkerboard versus stripes on the fixed physical torus of side n * kappa:
// the best stripe energy over admissible widths at the base pitch, and the
// checkerboard levels at pitch kappa, kappa/2, ... (the cross term grows as
// the pattern refines).  Requires d = 2, even n, tau > 0, levels >= 1.
struct CheckerboardReport {
  int d = 2;
  int n = 0;
  double best_stripe_total = 0;
  int best_stripe_width_cells = 0;  // half-period in base cells
  std::vector<CheckerboardLevel> levels;
};

CheckerboardReport checkerboard_report(int d, int n, double kappa,
                                       const KernelSpec& spec, int levels = 3);

// One diagnostic inequality: the constant fitted on a seeded sample, the
// relaxation applied for the disjoint check sample, and the worst check
// margin (nonnegative when the relaxed bound holds).  Exact identities are
// reported with relaxation 1 and an absolute tolerance folded into the
// margin.
struct FittedBound {
  std::string name;
  std::string statement;
  double fitted = 0;
  double relaxation = 1;
  double worst_margin = 0;
  bool holds = false;
  int fit_count = 0;
  int check_count = 0;
};

struct VerificationReport {
  std::vector<FittedBound> items;
  std::string text;  // human-readable rendering of all items
};

// Runs the window-energy and stripe-distance inequality suite at the given
// kernel on seeded fixtures of linear size n (d = 2 torus): the averaging
// identity, the full-line lower bound by the optimal stripe density, the
// segment bounds with fitted constants, the near-full cube bound, the
// per-jump gap bound, the Lipschitz property of the stripe distance, and the
// region-weighted integral bound.  Deterministic in (spec, n, seed).
VerificationReport verification_report(const KernelSpec& spec, int n,
                                       std::uint32_t seed);

}  // namespace stripes
