// Periodic 0/1 configurations on the d-dimensional lattice torus: perimeter,
// axis slices, the eta deficit function, stripe construction, canonical forms
// under the symmetry group, and the grid file format.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stripes {

struct TorusConfig {
  int d = 1;
  int n = 1;
  double spacing = 1;                // kappa
  std::vector<std::uint8_t> cells;   // n^d entries, row-major, 1 = in E

  TorusConfig() = default;
  TorusConfig(int d_, int n_, double kappa);

  double side() const { return n * spacing; }
  std::size_t size() const { return cells.size(); }
  // Flat row-major index with periodic coordinate reduction.
  std::size_t index(std::span<const int> x) const;
  bool at(std::span<const int> x) const { return cells[index(x)] != 0; }
  void set(std::span<const int> x, bool v) { cells[index(x)] = v ? 1 : 0; }
  std::size_t count() const;  // number of occupied cells

  bool operator==(const TorusConfig& o) const = default;
};

// One-dimensional periodic set: sorted jump locations in [0, period) placed
// at cell boundaries (half-integer multiples of the spacing for lattice
// sources), with a parity flag for the degenerate no-jump cases.
struct Slice1D {
  double period = 0;
  std::vector<double> jumps;
  bool starts_inside = false;  // membership at t = 0
};

struct StripeSpec {
  int direction = 0;  // axis index i
  double width = 1;   // h
  double phase = 0;   // nu in [0, 2h)
};

TorusConfig complement(const TorusConfig& cfg);

// Ordered-neighbor-pair perimeter: sum over cells and the 2d neighbors of
// |chi(x) - chi(y)|, times kappa^(d-1).  Each interface facet counts twice.
double perimeter_1(const TorusConfig& cfg);

// 1D slice along `axis` through the transverse lattice point `index`
// ((d-1) coordinates, in axis order with `axis` skipped).
Slice1D slice(const TorusConfig& cfg, int axis, std::span<const int> index);

// Deficit weight of a jump s against displacement z:
// min(z_+, s - s^-) + min(z_-, s^+ - s) with s^-, s^+ the periodic
// neighboring jumps.  Throws if the slice has no jumps or s is not a jump.
double eta(const Slice1D& sl, double s, double z);

// Periodic stripes: cells whose coordinate along spec.direction lies in
// the union of [2kh + nu, (2k+1)h + nu) mod L.  Requires 2h/kappa integral
// and dividing n.
TorusConfig make_stripes(const StripeSpec& spec, int d, int n, double kappa);

// Lexicographically minimal representative under translations, coordinate
// permutations, axis reflections, and complementation.
TorusConfig canonical_form(const TorusConfig& cfg);

// True when the set is invariant under all translations orthogonal to some
// axis (constant slices in every other direction); reports that axis and,
// when the pattern is alternating equal-width stripes, the width and phase.
struct StripeCheck {
  bool is_stripe = false;       // depends on at most one coordinate
  int direction = -1;
  bool is_periodic_stripe = false;  // equal width and gap
  StripeSpec spec;              // valid when is_periodic_stripe
};
StripeCheck stripe_check(const TorusConfig& cfg);

// Grid file format: header "d n kappa", then n^(d-1) rows of n characters
// '0'/'1' (plane-major for d = 3).  Round trips bit-exactly.
void write_grid(const TorusConfig& cfg, std::ostream& out);
TorusConfig read_grid(std::istream& in);
void write_grid_file(const TorusConfig& cfg, const std::string& path);
TorusConfig read_grid_file(const std::string& path);

}  // namespace stripes
