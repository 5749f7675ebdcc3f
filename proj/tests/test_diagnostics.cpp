// Tests for window diagnostics: independent counting/quadrature oracles for
// the per-jump window cost and the cross-direction disagreement integral,
// exact lattice averaging against the global decomposition, stripe-family
// distances against brute-force enumeration, region labeling fixtures, the
// checkerboard refinement report, and the fitted-constant verification
// report.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "stripes/diagnostics.hpp"
#include "stripes/energy.hpp"
#include "stripes/kernels.hpp"
#include "stripes/lattice.hpp"
#include "stripes/search.hpp"
#include "stripes/stripes1d.hpp"

using namespace stripes;

namespace {

// ---------------------------------------------------------------------------
// Oracle 1: per-jump window cost on a single periodic line, by integer cell
// counting and closed-form power integrals.  Everything is rebuilt from the
// raw cell values; no library geometry is reused.

struct LineJump {
  std::size_t cell = 0;  // cell left of the jump
  double s = 0;
};

std::vector<LineJump> line_jumps(const std::vector<int>& line, double kap) {
  std::vector<LineJump> out;
  const std::size_t n = line.size();
  for (std::size_t j = 0; j < n; ++j)
    if (line[j] != line[(j + 1) % n])
      out.push_back({j, (static_cast<double>(j) + 0.5) * kap});
  return out;
}

// integral of cq (c+z)^(-q) (y0 + slope (z - z0)) dz over [z0, z1]
double power_segment(double z0, double z1, double y0, double slope, double q,
                     double c, double cq) {
  const double alpha = y0 - slope * z0;
  const double beta = slope;
  if (alpha == 0 && beta == 0) return 0;
  const auto i0 = [&](double z) { return -std::pow(c + z, 1 - q) / (q - 1); };
  const auto i1 = [&](double z) {
    return -std::pow(c + z, 2 - q) / (q - 2) +
           c * std::pow(c + z, 1 - q) / (q - 1);
  };
  return cq * (alpha * (i0(z1) - i0(z0)) + beta * (i1(z1) - i1(z0)));
}

double oracle_jump_cost(const std::vector<int>& line, std::size_t which,
                        const KernelSpec& spec, double kap) {
  const std::size_t n = line.size();
  const double L = static_cast<double>(n) * kap;
  const std::vector<LineJump> jumps = line_jumps(line, kap);
  const std::size_t m = jumps.size();
  REQUIRE(m >= 2);
  const LineJump& jk = jumps[which];
  const LineJump& jprev = jumps[(which + m - 1) % m];
  const LineJump& jnext = jumps[(which + 1) % m];
  const int eps = line[jk.cell];

  // Cells of the two neighbor windows, unwrapped order.
  std::vector<std::size_t> left, right;
  for (std::size_t c = (jprev.cell + 1) % n; ; c = (c + 1) % n) {
    left.push_back(c);
    if (c == jk.cell) break;
  }
  for (std::size_t c = (jk.cell + 1) % n; ; c = (c + 1) % n) {
    right.push_back(c);
    if (c == jnext.cell) break;
  }

  // f(z) = 2z - m_r(z) - m_l(z), exact at cell-aligned shifts and linear
  // between them; one period, then linear growth 2L per period.
  std::vector<double> f(n + 1);
  for (std::size_t s = 0; s <= n; ++s) {
    int cnt_r = 0, cnt_l = 0;
    for (std::size_t c : left)
      if (line[(c + s) % n] != eps) ++cnt_r;
    for (std::size_t c : right)
      if (line[(c + n - (s % n)) % n] == eps) ++cnt_l;
    f[s] = 2 * static_cast<double>(s) * kap - kap * cnt_r - kap * cnt_l;
  }
  CHECK(f[0] == 0);

  const double q = spec.q();
  const double c = spec.range();
  const double cq = spec.cq();
  const int periods = 400;
  double total = 0;
  for (int kk = 0; kk < periods; ++kk) {
    const double off = kk * L;
    const double lift = 2 * off;
    for (std::size_t s = 0; s < n; ++s) {
      const double z0 = off + static_cast<double>(s) * kap;
      const double slope = (f[s + 1] - f[s]) / kap;
      total += power_segment(z0, z0 + kap, f[s] + lift, slope, q, c, cq);
    }
  }
  // Tail with the periodic part replaced by its mean.
  double cbar = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double z0 = static_cast<double>(s) * kap;
    const double z1 = z0 + kap;
    cbar += 0.5 * kap * ((2 * z0 - f[s]) + (2 * z1 - f[s + 1]));
  }
  cbar /= L;
  const double zt = periods * L;
  total += cq * (2 * std::pow(c + zt, 2 - q) / (q - 2) -
                 (2 * c + cbar) * std::pow(c + zt, 1 - q) / (q - 1));
  return -1.0 + total;
}

std::vector<int> row_of(const TorusConfig& cfg, int axis, int transverse) {
  std::vector<int> line(static_cast<std::size_t>(cfg.n));
  for (int a = 0; a < cfg.n; ++a) {
    std::array<int, 2> x{};
    x[static_cast<std::size_t>(axis)] = a;
    x[static_cast<std::size_t>(1 - axis)] = transverse;
    line[static_cast<std::size_t>(a)] = cfg.at(x) ? 1 : 0;
  }
  return line;
}

// ---------------------------------------------------------------------------
// Oracle 2: cross-direction disagreement integral for box geometries by
// 16-corner sums of the fourth antiderivative, over periodic images.

double psi4(double x, double c, double p) {
  return std::pow(c + x, 4 - p) / ((1 - p) * (2 - p) * (3 - p) * (4 - p));
}

double box4(std::array<double, 2> t0, std::array<double, 2> u0,
            std::array<double, 2> t1, std::array<double, 2> u1, double c,
            double p) {
  const auto orient = [](std::array<double, 2>& t, std::array<double, 2>& u) {
    if (u[0] >= t[1] - 1e-12) return;
    REQUIRE(u[1] <= t[0] + 1e-12);  // boxes must not straddle
    std::swap(t, u);
  };
  orient(t0, u0);
  orient(t1, u1);
  double sum = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double x = (u0[static_cast<std::size_t>(i)] -
                            t0[static_cast<std::size_t>(j)]) +
                           (u1[static_cast<std::size_t>(k)] -
                            t1[static_cast<std::size_t>(l)]);
          const double sgn = (i ? 1.0 : -1.0) * (j ? -1.0 : 1.0) *
                             (k ? 1.0 : -1.0) * (l ? -1.0 : 1.0);
          sum += sgn * psi4(x, c, p);
        }
  return sum;
}

// ---------------------------------------------------------------------------
// Oracle 3: brute-force stripe-family distance by enumerating every value
// assignment on the half-spacing grid segments of the window.

double mass_between(const TorusConfig& cfg, int axis, double tlo, double tlen,
                    double x0, double x1) {
  // integral over [x0, x1] of the transverse occupied length at axis
  // coordinate x, by scanning cell images directly.
  const int n = cfg.n;
  const double kap = cfg.spacing;
  const double L = cfg.side();
  double total = 0;
  for (int c = 0; c < n; ++c) {
    double tl = 0;  // transverse occupied length of column c in the window
    if (cfg.d == 1) {
      std::array<int, 1> x{c};
      tl = cfg.at(x) ? 1.0 : 0.0;
    } else {
      for (int r = 0; r < n; ++r) {
        std::array<int, 2> x{};
        x[static_cast<std::size_t>(axis)] = c;
        x[static_cast<std::size_t>(1 - axis)] = r;
        if (!cfg.at(x)) continue;
        for (int img = -1; img <= 1; ++img) {
          const double a = (r - 0.5) * kap + img * L;
          const double b = (r + 0.5) * kap + img * L;
          tl += std::max(0.0, std::min(b, tlo + tlen) - std::max(a, tlo));
        }
      }
    }
    if (tl == 0) continue;
    for (int img = -1; img <= 1; ++img) {
      const double a = (c - 0.5) * kap + img * L;
      const double b = (c + 0.5) * kap + img * L;
      const double ov = std::max(0.0, std::min(b, x1) - std::max(a, x0));
      total += tl * ov;
    }
  }
  return total;
}

double brute_stripe_distance(const TorusConfig& cfg, const Cube& cube,
                             int axis, double eta) {
  const double kap = cfg.spacing;
  const double l = cube.side;
  const double lo = cube.center[static_cast<std::size_t>(axis)] - l / 2;
  const double end = lo + l;
  const double tlo =
      cfg.d == 2 ? cube.center[static_cast<std::size_t>(1 - axis)] - l / 2
                 : 0.0;
  const double htot = cfg.d == 2 ? l : 1.0;

  // Segment grid: window edges plus every half-spacing point inside.
  std::vector<double> cuts{lo};
  const double step = 0.5 * kap;
  for (long long m = static_cast<long long>(std::ceil(lo / step)) - 1;; ++m) {
    const double g = static_cast<double>(m) * step;
    if (g <= lo + 1e-12) continue;
    if (g >= end - 1e-12) break;
    cuts.push_back(g);
  }
  cuts.push_back(end);
  const std::size_t segs = cuts.size() - 1;
  REQUIRE(segs <= 14);

  std::vector<double> seg_mass(segs), seg_len(segs);
  for (std::size_t s = 0; s < segs; ++s) {
    seg_len[s] = cuts[s + 1] - cuts[s];
    seg_mass[s] = mass_between(cfg, axis, tlo, l, cuts[s], cuts[s + 1]);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t bits = 0; bits < (std::size_t{1} << segs); ++bits) {
    // Interior runs must span at least eta; runs touching the window edges
    // are free because their boundaries may lie outside.
    bool ok = true;
    double run = 0;
    bool interior = false;
    for (std::size_t s = 1; s <= segs; ++s) {
      const bool same =
          s < segs && (((bits >> s) & 1u) == ((bits >> (s - 1)) & 1u));
      run += seg_len[s - 1];
      if (!same) {
        if (s < segs) {
          if (interior && run < eta - 1e-9) {
            ok = false;
            break;
          }
          interior = true;
        }
        run = 0;
      }
    }
    if (!ok) continue;
    double cost = 0;
    for (std::size_t s = 0; s < segs; ++s)
      cost += ((bits >> s) & 1u) ? htot * seg_len[s] - seg_mass[s]
                                 : seg_mass[s];
    best = std::min(best, cost);
  }
  return best / std::pow(l, cfg.d);
}

TorusConfig grain(int n, int w) {
  TorusConfig cfg(2, n, 1.0);
  for (int x0 = 0; x0 < n; ++x0)
    for (int x1 = 0; x1 < n; ++x1) {
      const bool v = x1 >= n / 2 ? ((x0 / w) % 2 == 0) : ((x1 / w) % 2 == 0);
      cfg.cells[static_cast<std::size_t>(x0) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(x1)] = v ? 1 : 0;
    }
  return cfg;
}

TorusConfig random_torus(int d, int n, double spacing, std::mt19937& rng,
                         double fill = 0.5) {
  TorusConfig cfg(d, n, spacing);
  std::bernoulli_distribution bit(fill);
  for (auto& c : cfg.cells) c = bit(rng) ? 1 : 0;
  return cfg;
}

}  // namespace

TEST_CASE("jump cost matches the counting oracle on one dimension") {
  const std::vector<int> line{1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1};
  TorusConfig cfg(1, 12, 1.0);
  for (std::size_t i = 0; i < line.size(); ++i) cfg.cells[i] = line[i];

  for (double tau : {0.7, 0.0}) {
    const KernelSpec spec(1, 3.0, tau, KernelFamily::OneNorm);
    // Full-circle window: the sum of all jump costs.
    const Cube full{{0.0}, cfg.side()};
    const LocalEnergy le = local_energy(cfg, full, spec);
    const std::vector<LineJump> jumps = line_jumps(line, 1.0);
    double sum = 0;
    for (std::size_t k = 0; k < jumps.size(); ++k)
      sum += oracle_jump_cost(line, k, spec, 1.0);
    CHECK(le.r_sum[0] * cfg.side() ==
          doctest::Approx(sum).epsilon(1e-7));
    CHECK(le.f_bar_total == doctest::Approx(le.r_sum[0]).epsilon(1e-12));

    // Single-jump window around s = 2.5 (adjacent gaps exceed the side).
    const Cube one{{2.5}, 1.0};
    const LocalEnergy ls = local_energy(cfg, one, spec);
    std::size_t which = 0;
    while (jumps[which].s != 2.5) ++which;
    CHECK(ls.r_sum[0] * 1.0 ==
          doctest::Approx(oracle_jump_cost(line, which, spec, 1.0))
              .epsilon(1e-7));
  }
}

TEST_CASE("one-dimensional averages reproduce the decomposition bound") {
  const KernelSpec spec(1, 3.0, 0.7, KernelFamily::OneNorm);
  std::mt19937 rng(11);
  for (int rep = 0; rep < 4; ++rep) {
    const TorusConfig cfg = random_torus(1, 10, 1.0, rng);
    if (perimeter_1(cfg) == 0) continue;
    const double lb = decompose(cfg, spec).lower_bound;
    // Full-torus window equals the bound outright.
    const LocalEnergy le = local_energy(cfg, {{0.3}, cfg.side()}, spec);
    CHECK(le.f_bar_total == doctest::Approx(lb).epsilon(1e-9));
    // Half-spacing center lattice at a shorter side.
    double mean = 0;
    const int n2 = 2 * cfg.n;
    for (int m = 0; m < n2; ++m)
      mean +=
          local_energy(cfg, {{(m + 0.5) * 0.5}, 2.0}, spec).f_bar_total;
    mean /= n2;
    CHECK(mean == doctest::Approx(lb).epsilon(1e-8));
  }
}

TEST_CASE("stripe windows carry the one-dimensional stripe density") {
  const KernelSpec spec(1, 3.0, 0.7, KernelFamily::OneNorm);
  const TorusConfig cfg = make_stripes({0, 2.0, 0.0}, 1, 8, 1.0);
  const double density = e_inf_tau(2.0, spec);
  const LocalEnergy le = local_energy(cfg, {{0.0}, cfg.side()}, spec);
  CHECK(le.f_bar_total == doctest::Approx(density).epsilon(1e-9));
  CHECK(decompose(cfg, spec).lower_bound ==
        doctest::Approx(density).epsilon(1e-9));
}

TEST_CASE("cross integral matches the image-sum oracle") {
  const double p = 4.5;
  const KernelSpec spec(2, p, 0.5, KernelFamily::OneNorm);
  const double c = spec.range();
  TorusConfig cfg(2, 6, 1.0);
  cfg.set(std::array<int, 2>{4, 1}, true);
  cfg.set(std::array<int, 2>{1, 4}, true);

  const LocalEnergy le = local_energy(cfg, {{1.0, 1.0}, 1.0}, spec);
  CHECK(le.r_sum[0] == 0.0);
  CHECK(le.r_sum[1] == 0.0);
  CHECK(le.v_sum[0] == 0.0);
  CHECK(le.v_sum[1] == 0.0);
  CHECK(le.w_int[0] == le.w_int[1]);

  // The image sum converges like K^(3-p) per axis, so the truncated oracle
  // carries a few parts in 1e7 of tail error at this cutoff.
  double total = 0;
  for (int k0 = -300; k0 <= 300; ++k0)
    for (int k1 = -300; k1 <= 300; ++k1)
      total += box4({0.5, 1.5}, {3.5 + 6.0 * k0, 4.5 + 6.0 * k0}, {0.5, 1.5},
                    {3.5 + 6.0 * k1, 4.5 + 6.0 * k1}, c, p);
  CHECK(le.w_int[0] == doctest::Approx(0.5 * total).epsilon(1e-6));

  // A window holding exactly one jump: the direction-0 cost is that jump's.
  const LocalEnergy lj = local_energy(cfg, {{4.0, 1.0}, 1.0}, spec);
  const std::vector<int> row = row_of(cfg, 0, 1);
  const std::vector<LineJump> jumps = line_jumps(row, 1.0);
  std::size_t which = 0;
  while (jumps[which].s != 3.5) ++which;
  CHECK(lj.r_sum[0] ==
        doctest::Approx(oracle_jump_cost(row, which, spec, 1.0))
            .epsilon(1e-7));
  CHECK(lj.v_sum[0] >= 0.0);
  CHECK(lj.w_int[0] >= 0.0);
}

TEST_CASE("two-dimensional averages reproduce the decomposition bound") {
  const KernelSpec spec(2, 4.0, 0.5, KernelFamily::OneNorm);
  std::mt19937 rng(7);
  const TorusConfig random4 = random_torus(2, 4, 1.0, rng);
  TorusConfig mixed = make_stripes({1, 1.0, 0.0}, 2, 4, 1.0);
  mixed.cells[5] = mixed.cells[5] ? 0 : 1;
  for (const TorusConfig& cfg : {random4, mixed}) {
    const double lb = decompose(cfg, spec).lower_bound;
    const int n2 = 2 * cfg.n;
    double mean = 0;
    for (int i0 = 0; i0 < n2; ++i0)
      for (int i1 = 0; i1 < n2; ++i1)
        mean += local_energy(
                    cfg, {{(i0 + 0.5) * 0.5, (i1 + 0.5) * 0.5}, 2.0}, spec)
                    .f_bar_total;
    mean /= n2 * n2;
    CHECK(mean == doctest::Approx(lb).epsilon(1e-8));
  }

  // Full-torus window: equality without averaging, and the two
  // direction-resolved cross terms agree.
  const LocalEnergy le =
      local_energy(random4, {{0.0, 0.0}, random4.side()}, spec);
  CHECK(le.f_bar_total ==
        doctest::Approx(decompose(random4, spec).lower_bound).epsilon(1e-8));
  CHECK(le.v_sum[0] == doctest::Approx(le.w_int[0]).epsilon(1e-8));
  CHECK(le.v_sum[1] == doctest::Approx(le.w_int[1]).epsilon(1e-8));
  // Direction-0 jump costs across all rows against the counting oracle.
  double orc = 0;
  for (int t = 0; t < random4.n; ++t) {
    const std::vector<int> row = row_of(random4, 0, t);
    const std::vector<LineJump> jumps = line_jumps(row, 1.0);
    for (std::size_t k = 0; k < jumps.size(); ++k)
      orc += oracle_jump_cost(row, k, spec, 1.0);
  }
  orc *= random4.spacing;  // transverse cell width
  CHECK(le.r_sum[0] * random4.side() * random4.side() ==
        doctest::Approx(orc).epsilon(1e-7));
}

TEST_CASE("stripe configurations have exactly vanishing cross windows") {
  const KernelSpec spec(2, 4.0, 0.0, KernelFamily::OneNorm);
  const TorusConfig cfg = make_stripes({1, 2.0, 0.0}, 2, 8, 1.0);
  const double lb = decompose(cfg, spec).lower_bound;
  for (double z0 : {0.25, 1.75}) {
    const LocalEnergy le = local_energy(cfg, {{z0, z0 + 0.5}, 2.0}, spec);
    CHECK(le.v_sum[0] == 0.0);
    CHECK(le.v_sum[1] == 0.0);
    CHECK(le.w_int[0] == 0.0);
    CHECK(le.f_bar[0] == 0.0);
    CHECK(le.f_bar_total == doctest::Approx(lb).epsilon(1e-9));
  }
  // A configuration with a crossing interface diverges at tau = 0.
  TorusConfig dot(2, 4, 1.0);
  dot.set(std::array<int, 2>{2, 2}, true);
  const LocalEnergy ld = local_energy(dot, {{2.0, 2.0}, 1.0}, spec);
  CHECK(std::isinf(ld.w_int[0]));
  CHECK(std::isinf(ld.f_bar_total));
}

TEST_CASE("local_energy validates its inputs") {
  const KernelSpec spec(2, 4.0, 0.5, KernelFamily::OneNorm);
  const TorusConfig cfg(2, 4, 1.0);
  CHECK_THROWS_AS(local_energy(cfg, {{0.0}, 1.0}, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(local_energy(cfg, {{0.0, 0.0}, 0.0}, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(local_energy(cfg, {{0.0, 0.0}, 9.0}, spec),
                  std::invalid_argument);
  const KernelSpec eu(2, 4.0, 0.5, KernelFamily::Euclidean);
  CHECK_THROWS_AS(local_energy(cfg, {{0.0, 0.0}, 1.0}, eu),
                  std::invalid_argument);
  const KernelSpec d1(1, 3.0, 0.5, KernelFamily::OneNorm);
  CHECK_THROWS_AS(local_energy(cfg, {{0.0, 0.0}, 1.0}, d1),
                  std::invalid_argument);
}

TEST_CASE("stripe distance: exact zeros and the checkerboard half") {
  // Admissible stripes at distance zero.
  const TorusConfig s = make_stripes({0, 2.0, 0.0}, 2, 8, 1.0);
  CHECK(stripe_distance(s, {{1.3, 2.6}, 4.0}, 0, 1.0) == 0.0);
  CHECK(stripe_distance_min(s, {{0.0, 0.0}, 8.0}, 1.0) == 0.0);
  // Empty set at distance zero in every direction.
  const TorusConfig empty(2, 6, 1.0);
  CHECK(stripe_distance(empty, {{2.0, 2.0}, 3.0}, 0, 1.0) == 0.0);
  CHECK(stripe_distance(empty, {{2.0, 2.0}, 3.0}, 1, 1.0) == 0.0);
  // Unit checkerboard: flat profile of half mass, distance one half.
  TorusConfig cb(2, 8, 1.0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      cb.cells[static_cast<std::size_t>(i) * 8 + j] = (i + j) % 2;
  CHECK(stripe_distance(cb, {{2.0, 2.0}, 4.0}, 0, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stripe_distance(cb, {{2.0, 2.0}, 4.0}, 1, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stripe distance matches brute-force family enumeration") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    const TorusConfig cfg = random_torus(2, 6, 1.0, rng);
    for (double off : {0.0, 0.25}) {
      const Cube q{{2.0 + off, 3.0 + off}, 3.0};
      for (int axis = 0; axis < 2; ++axis)
        for (double eta : {0.5, 1.0}) {
          const double dp = stripe_distance(cfg, q, axis, eta);
          const double br = brute_stripe_distance(cfg, q, axis, eta);
          CHECK(dp == doctest::Approx(br).epsilon(1e-10));
        }
    }
  }
  // One-dimensional window against the same brute force.
  for (int rep = 0; rep < 4; ++rep) {
    const TorusConfig cfg = random_torus(1, 10, 1.0, rng);
    const Cube q{{3.25}, 4.0};
    for (double eta : {0.5, 1.5}) {
      const double dp = stripe_distance(cfg, q, 0, eta);
      const double br = brute_stripe_distance(cfg, q, 0, eta);
      CHECK(dp == doctest::Approx(br).epsilon(1e-10));
    }
  }
}

TEST_CASE("region labels recognize stripes, trivial sets and grains") {
  const KernelSpec spec(2, 4.0, 0.5, KernelFamily::OneNorm);
  const RegionParams params{2.0, 1.0, 0.1, 1.0, 0.0};

  const TorusConfig s = make_stripes({0, 2.0, 0.0}, 2, 8, 1.0);
  const RegionMap ms = region_decompose(s, params, spec);
  CHECK(ms.count(1) == s.size());

  const TorusConfig empty(2, 8, 1.0);
  const RegionMap me = region_decompose(empty, params, spec);
  CHECK(me.count(-1) == empty.size());

  const TorusConfig g = grain(12, 2);
  const RegionMap mg = region_decompose(g, params, spec);
  CHECK(mg.count(1) > 0);
  CHECK(mg.count(2) > 0);
  CHECK(mg.count(0) + mg.count(-1) > 0);
  CHECK(mg.count(1) + mg.count(2) + mg.count(0) + mg.count(-1) == g.size());

  // Every stripe-labeled cell is close in its direction and far in the
  // other, as the labels promise.
  for (int x0 = 0; x0 < 12; ++x0)
    for (int x1 = 0; x1 < 12; ++x1) {
      const int lab = mg.labels[static_cast<std::size_t>(x0) * 12 +
                                static_cast<std::size_t>(x1)];
      if (lab <= 0) continue;
      const Cube q{{x0 * 1.0, x1 * 1.0}, params.l};
      const double din = stripe_distance(g, q, lab - 1, params.eta);
      const double dout = stripe_distance(g, q, 2 - lab, params.eta);
      CHECK(din <= params.delta);
      CHECK(dout > params.delta);
    }

  // Transposing the configuration transposes the labels and swaps the two
  // stripe directions.
  TorusConfig gt(2, 12, 1.0);
  for (int x0 = 0; x0 < 12; ++x0)
    for (int x1 = 0; x1 < 12; ++x1)
      gt.cells[static_cast<std::size_t>(x1) * 12 +
               static_cast<std::size_t>(x0)] =
          g.cells[static_cast<std::size_t>(x0) * 12 +
                  static_cast<std::size_t>(x1)];
  const RegionMap mt = region_decompose(gt, params, spec);
  for (int x0 = 0; x0 < 12; ++x0)
    for (int x1 = 0; x1 < 12; ++x1) {
      const int a = mg.labels[static_cast<std::size_t>(x0) * 12 +
                              static_cast<std::size_t>(x1)];
      const int b = mt.labels[static_cast<std::size_t>(x1) * 12 +
                              static_cast<std::size_t>(x0)];
      const int swapped = a == 1 ? 2 : a == 2 ? 1 : a;
      CHECK(b == swapped);
    }

  // Serialization: header plus one label character per cell.
  std::ostringstream os;
  write_region_map(mg, os);
  std::istringstream is(os.str());
  std::string first;
  std::getline(is, first);
  CHECK(first == std::string("2 12 1"));
  std::string row;
  std::size_t rows = 0;
  while (std::getline(is, row)) {
    CHECK(row.size() == 12);
    for (char ch : row)
      CHECK((ch == '-' || ch == '0' || ch == '1' || ch == '2'));
    ++rows;
  }
  CHECK(rows == 12);

  CHECK_THROWS_AS(region_decompose(s, {9.0, 1.0, 0.1, 1.0, 0.0}, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(region_decompose(s, {2.0, 0.0, 0.1, 1.0, 0.0}, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(region_decompose(s, {2.0, 1.0, 1.5, 1.0, 0.0}, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(region_decompose(s, {2.0, 1.0, 0.1, -1.0, 0.0}, spec),
                  std::invalid_argument);
}

TEST_CASE("checkerboard refinement loses to stripes and grows its cross term") {
  const KernelSpec spec(2, 4.0, 0.5, KernelFamily::OneNorm);
  const CheckerboardReport rep = checkerboard_report(2, 4, 1.0, spec, 3);
  REQUIRE(rep.levels.size() == 3);
  CHECK(rep.best_stripe_width_cells >= 1);
  for (const CheckerboardLevel& lvl : rep.levels) {
    CHECK(lvl.total > rep.best_stripe_total);
    CHECK(lvl.cross > 0.0);
  }
  CHECK(rep.levels[1].cross > rep.levels[0].cross);
  CHECK(rep.levels[2].cross > rep.levels[1].cross);

  // Same torus as stripe_scan: cell spacing equal to the kernel range.
  const CheckerboardReport rng =
      checkerboard_report(2, 4, spec.range(), spec, 3);
  CHECK(rng.levels[0].total > stripe_scan(4, spec).best_energy);

  CHECK_THROWS_AS(checkerboard_report(1, 4, 1.0, spec, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(checkerboard_report(2, 5, 1.0, spec, 2),
                  std::invalid_argument);
  const KernelSpec zero(2, 4.0, 0.0, KernelFamily::OneNorm);
  CHECK_THROWS_AS(checkerboard_report(2, 4, 1.0, zero, 2),
                  std::invalid_argument);
}

TEST_CASE("verification report checks every recorded inequality") {
  const KernelSpec spec(2, 4.0, 0.5, KernelFamily::OneNorm);
  const VerificationReport rep = verification_report(spec, 4, 1);
  REQUIRE(rep.items.size() == 10);
  const std::vector<std::string> names{
      "averaging-identity",     "line-bound-universal",
      "line-bound-striped",     "segment-bound-striped",
      "segment-bound-anchored", "segment-bound-free",
      "near-full-bound",        "jump-gap-bound",
      "distance-lipschitz",     "region-integral-bound"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(rep.items[i].name == names[i]);
    CHECK(rep.items[i].check_count > 0);
    INFO(rep.items[i].name, " margin ", rep.items[i].worst_margin);
    CHECK(rep.items[i].holds);
  }
  for (const FittedBound& b : rep.items)
    if (b.relaxation > 1) CHECK(b.fit_count > 0);
  CHECK(rep.text.find("averaging-identity") != std::string::npos);
  CHECK(rep.text.find("FAIL") == std::string::npos);

  CHECK_THROWS_AS(verification_report(spec, 5, 1), std::invalid_argument);
  const KernelSpec d1(1, 3.0, 0.5, KernelFamily::OneNorm);
  CHECK_THROWS_AS(verification_report(d1, 4, 1), std::invalid_argument);
}
