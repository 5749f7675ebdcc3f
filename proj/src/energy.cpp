// Torus energies: critical couplings with certified tails, total energies
// through configuration autocorrelation (direct or FFT), the rescaled
// near-critical lattice energy, slice deficits, and the directional
// decomposition with its lower bound.
//
// The decomposition machinery reduces every kernel integral or lattice sum
// to finitely many table entries:
//   * autocorrelation counts C(a) = sum_x chi(x) chi(x+a), from which both
//     the displacement disagreement counts 2(cnt - C(a)) and the
//     cross-direction coincidence counts
//     M(a) = cnt - C(0,a2) - C(a1,0) + C(-a1,a2) are bilinear;
//   * for the smoothed 1-norm kernel, a quadrant table of the kernel
//     integrated against tensor tent weights (piecewise-linear hat
//     functions), since the overlap quantities above extend to exactly
//     piecewise-bilinear functions of the real displacement;
//   * for the Euclidean power kernel, the periodized image table itself.
// Image sums over the tables are closed up with Hurwitz zeta tails.
#include "stripes/energy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stripes/numerics.hpp"
#include "stripes/overlap1d.hpp"

namespace stripes {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constant of the transverse line collapse: for large t,
//   g_p(t) = sum_{y in Z} (t^2 + y^2)^(-p/2) = cp * t^(1-p) * (1 + eps(t))
// with eps exponentially small (Poisson summation: the correction is a
// Bessel image series of size O(t e^(-2 pi t))).
double line_collapse_constant(double p) {
  return std::sqrt(M_PI) * std::tgamma((p - 1) / 2) / std::tgamma(p / 2);
}

// g_p(t) = sum_{y in Z} (t^2 + y^2)^(-p/2) for t >= 1, to ~1e-15 relative:
// direct terms up to Y >= 3t, then the remainder by Euler-Maclaurin with the
// integral expanded as a binomial series in (t/y)^2.
double line_sum(double p, double t) {
  const int ylim = std::max(50, static_cast<int>(3 * t) + 1);
  double s = std::pow(t, -p);
  for (int y = 1; y <= ylim; ++y) s += 2 * std::pow(t * t + y * y, -p / 2);
  const double a = ylim + 1;
  const double u = t * t + a * a;
  // integral: int_a^inf (t^2+y^2)^(-p/2) dy = sum_j binom(-p/2, j) t^(2j)
  //           a^(1-p-2j) / (p + 2j - 1), ratio (t/a)^2 < 1/9.
  const double x = (t / a) * (t / a);
  const double a1p = std::pow(a, 1 - p);
  double integral = 0;
  double binom = 1;
  double xp = 1;
  for (int j = 0; j < 200; ++j) {
    const double term = binom * xp * a1p / (p + 2 * j - 1);
    integral += term;
    if (std::abs(term) < 1e-18 * integral) break;
    binom *= (-p / 2 - j) / (j + 1);
    xp *= x;
  }
  const double f = std::pow(u, -p / 2);
  const double fp = -p * a * std::pow(u, -p / 2 - 1);
  const double fppp = 3 * p * (p + 2) * a * std::pow(u, -p / 2 - 2) -
                      p * (p + 2) * (p + 4) * a * a * a * std::pow(u, -p / 2 - 3);
  s += 2 * (integral + f / 2 - fp / 12 + fppp / 720);
  return s;
}

// ---------------------------------------------------------------------------
// Autocorrelation tables.

// Circular autocorrelation counts C(a) = sum_x chi(x) chi(x+a), as a
// row-major offset table (n entries at d=1, n^2 at d=2).
std::vector<long long> autocorrelation(const TorusConfig& cfg) {
  const int n = cfg.n;
  if (cfg.d == 1) {
    std::vector<long long> c(n, 0);
    for (int x = 0; x < n; ++x) {
      if (!cfg.cells[x]) continue;
      for (int a = 0; a < n; ++a) c[a] += cfg.cells[(x + a) % n];
    }
    return c;
  }
  std::vector<long long> c(static_cast<std::size_t>(n) * n, 0);
  for (int x1 = 0; x1 < n; ++x1)
    for (int x2 = 0; x2 < n; ++x2) {
      if (!cfg.cells[static_cast<std::size_t>(x1) * n + x2]) continue;
      for (int a1 = 0; a1 < n; ++a1) {
        const int r1 = (x1 + a1) % n;
        for (int a2 = 0; a2 < n; ++a2)
          c[static_cast<std::size_t>(a1) * n + a2] +=
              cfg.cells[static_cast<std::size_t>(r1) * n + (x2 + a2) % n];
      }
    }
  return c;
}

// ---------------------------------------------------------------------------
// Quadrant tent table for the smoothed 1-norm kernel at d = 2.
//
// In grid units (displacement zeta = kappa * u, c' = range/kappa) define
//   H(j1, j2) = int int tent_{j1}(u1) tent_{j2}(u2) (u1 + u2 + c')^(-p) du,
// over u >= 0, where tent_j(u) = max(0, 1 - |u - j|) for j >= 1 and tent_0
// is the descending half-tent on [0, 1].  Entry (s1, s2) of the table is
//   W_H(s1, s2) = sum_{j1 >= 0, j1 = s1 (mod n)} sum_{j2 likewise} H(j1, j2).
// For any per-axis even, n-periodic function B that is bilinear between
// lattice points, splitting B into tensor tents gives
//   int_{R^2} (|z1| + |z2| + c)^(-p) B(z/kappa) dz
//     = kappa^2 * scale * sum_s fold4(B)(s) W_H(s),
//   fold4(B)(s) = sum_{signs e} B((e1 s1) mod n, (e2 s2) mod n),
// with scale = kappa^(2-p) carrying the physical units.
//
// Tent integrals against the kernel are evaluated exactly through the
// antiderivative chain psi_k (psi_0(s) = s^(-p), psi_k' = -psi_(k-1)):
// integrating one tent twice by parts leaves a second-difference stencil,
// so both tents interior gives a fourth-difference stencil on psi_4 that
// depends only on r = j1 + j2, and each half-tent at the boundary
// contributes a mixed third/second-difference stencil.  All stencils have
// zero weight sum per psi level, so the logarithmic branch at integer p is
// well defined.  Image sums over j are closed with Hurwitz zeta tails once
// the stencil argument exceeds a direct-summation limit; a two-term
// asymptotic expansion in the tent width with a certified fourth-moment
// remainder keeps the tail error below ~1e-13 of the entry scale.
struct HatQuadrantTable {
  int n = 0;
  double scale = 1;  // kappa^(2-p)
  std::vector<double> w;
  double tail_error = 0;  // certified bound, in grid units (pre-scale)

  double at(int s1, int s2) const {
    return w[static_cast<std::size_t>(s1) * n + s2];
  }
};

// Exact tent-against-kernel integrals via the antiderivative chain.
// Integrating a tent weight by parts twice leaves a second-difference
// stencil of psi values; composing two tents gives the three cases below.
// All stencils have zero weight sum per psi level, so the logarithmic
// branch of the chain at integer p is well defined.
struct TentStencils {
  PowerChain chain;
  double cg;

  TentStencils(double p, double cg_) : chain(p, 4), cg(cg_) {}

  double psi(int k, double s) const {
    return s <= 0 ? kInf : chain.psi(k, s);
  }
  // Both tents interior; depends only on r = j1 + j2.
  double pair(double r) const {
    if (r - 2 + cg <= 0) return kInf;
    return psi(4, cg + r - 2) - 4 * psi(4, cg + r - 1) + 6 * psi(4, cg + r) -
           4 * psi(4, cg + r + 1) + psi(4, cg + r + 2);
  }
  // Half-tent at zero against an interior tent at j = tt >= 1.
  double edge(double tt) const {
    if (tt - 1 + cg <= 0) return kInf;
    return -psi(4, cg + tt - 1) + 3 * psi(4, cg + tt) -
           3 * psi(4, cg + tt + 1) + psi(4, cg + tt + 2) +
           psi(3, cg + tt - 1) - 2 * psi(3, cg + tt) + psi(3, cg + tt + 1);
  }
  // Both half-tents at zero.
  double corner() const {
    if (cg <= 0) return kInf;
    return psi(4, cg + 2) - 2 * psi(4, cg + 1) + psi(4, cg) +
           2 * psi(3, cg + 1) - 2 * psi(3, cg) + psi(2, cg);
  }
};

HatQuadrantTable build_hat_table(double p, int n, double kappa, double range) {
  HatQuadrantTable t;
  t.n = n;
  t.scale = std::pow(kappa, 2 - p);
  t.w.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double cg = range / kappa;  // kernel offset in grid units
  const TentStencils st(p, cg);
  const auto h_pair = [&](double r) { return st.pair(r); };
  const auto h_edge = [&](double tt) { return st.edge(tt); };
  const auto h_corner = [&]() { return st.corner(); };

  const double direct_limit = 256;  // switch to asymptotic tails beyond this
  const double p4 = p * (p + 1) * (p + 2) * (p + 3);
  const double np = std::pow(n, -p);

  // Image sum over one boundary line, j = sp + n k, k >= 0.
  const auto edge_line = [&](int sp, double& err) {
    double v = 0;
    int k = 0;
    for (; sp + static_cast<double>(n) * k + cg < direct_limit; ++k) {
      v += h_edge(sp + static_cast<double>(n) * k);
      if (!std::isfinite(v)) return v;
    }
    // Tail: the half-tent x tent weight has mass 1/2, mean 1/3 and central
    // moments mu2 = 2/9, mu3 = 1/135, so
    //   H(0, tt) = 1/2 [ g + (mu2/2) g'' + (mu3/6) g''' ](tt + 1/3 + cg)
    // with g(s) = s^(-p), up to a fourth-moment remainder.
    const double x = (sp + static_cast<double>(n) * k + 1.0 / 3 + cg) / n;
    v += 0.5 * np * hurwitz_zeta(p, x);
    v += (p * (p + 1) / 18) * np / (n * n) * hurwitz_zeta(p + 2, x);
    v -= (p * (p + 1) * (p + 2) / 1620) * np / (n * n * n) *
         hurwitz_zeta(p + 3, x);
    const double x4 = (sp + static_cast<double>(n) * k - 1 + cg) / n;
    err += 0.0055 * p4 * np / std::pow(n, 4) * hurwitz_zeta(p + 4, x4);
    return v;
  };

  for (int s1 = 0; s1 < n; ++s1)
    for (int s2 = s1; s2 < n; ++s2) {
      const int s1p = s1 == 0 ? n : s1;
      const int s2p = s2 == 0 ? n : s2;
      const int r0 = s1p + s2p;
      double val = 0;
      double err = 0;
      // Interior x interior images, collapsed along the diagonal:
      // multiplicity m + 1 at r = r0 + n m.
      int m = 0;
      for (; r0 + static_cast<double>(n) * m + cg < direct_limit; ++m) {
        val += (m + 1) * h_pair(r0 + static_cast<double>(n) * m);
        if (!std::isfinite(val)) break;
      }
      if (std::isfinite(val)) {
        // Two-term tail of h_pair(r) = (r+cg)^(-p) + p(p+1)/6 (r+cg)^(-p-2)
        // + R, |R| <= 0.02 p4 (r-2+cg)^(-p-4), with the (m+1) weights split
        // as (m + A) + (1 - A).
        const double aa = (r0 + cg) / n;
        val += np * (hurwitz_zeta(p - 1, m + aa) +
                     (1 - aa) * hurwitz_zeta(p, m + aa));
        val += (p * (p + 1) / 6) * np / (n * n) *
               (hurwitz_zeta(p + 1, m + aa) +
                (1 - aa) * hurwitz_zeta(p + 2, m + aa));
        const double a2 = (r0 - 2 + cg) / n;
        err += 0.02 * p4 * np / std::pow(n, 4) *
               (hurwitz_zeta(p + 3, m + a2) +
                (1 - a2) * hurwitz_zeta(p + 4, m + a2));
        if (s1 == 0) val += edge_line(s2p, err);
        if (s2 == 0 && std::isfinite(val)) val += edge_line(s1p, err);
        if (s1 == 0 && s2 == 0 && std::isfinite(val)) val += h_corner();
      }
      t.w[static_cast<std::size_t>(s1) * n + s2] = val;
      t.w[static_cast<std::size_t>(s2) * n + s1] = val;
      if (std::isfinite(val)) t.tail_error += (s1 == s2 ? 1 : 2) * err;
    }
  return t;
}

// fold4 of the pair-coincidence table: with C the autocorrelation counts,
//   M(a) = cnt - C(0,a2) - C(a1,0) + C(-a1,a2)
// counts the x with chi(x) != chi(x+a1 e1) and chi(x) != chi(x+a2 e2); the
// four-fold sign sum collapses by C(-a) = C(a) to the form below.  Exact
// integer arithmetic; vanishes identically when either index is 0.
long long fold4_cross(const std::vector<long long>& c, int n, long long cnt,
                      int s1, int s2) {
  const int m1 = (n - s1) % n;
  return 4 * (cnt - c[s2] - c[static_cast<std::size_t>(s1) * n]) +
         2 * (c[static_cast<std::size_t>(s1) * n + s2] +
              c[static_cast<std::size_t>(m1) * n + s2]);
}

// fold4 of the autocorrelation itself (for the pair-overlap contraction).
long long fold4_corr(const std::vector<long long>& c, int n, int s1, int s2) {
  const int m1 = (n - s1) % n;
  return 2 * (c[static_cast<std::size_t>(s1) * n + s2] +
              c[static_cast<std::size_t>(m1) * n + s2]);
}

// ---------------------------------------------------------------------------
// Correlation dot products for energy_dsc.

double correlation_dot_direct(const TorusConfig& cfg,
                              const PeriodizedKernel& w) {
  const int n = cfg.n;
  double t = 0;
  if (cfg.d == 1) {
    for (int x = 0; x < n; ++x) {
      if (!cfg.cells[x]) continue;
      for (int a = 0; a < n; ++a)
        if (cfg.cells[(x + a) % n]) t += w.table[a];
    }
    return t;
  }
  for (int x1 = 0; x1 < n; ++x1)
    for (int x2 = 0; x2 < n; ++x2) {
      if (!cfg.cells[static_cast<std::size_t>(x1) * n + x2]) continue;
      for (int a1 = 0; a1 < n; ++a1) {
        const int r1 = (x1 + a1) % n;
        for (int a2 = 0; a2 < n; ++a2)
          if (cfg.cells[static_cast<std::size_t>(r1) * n + (x2 + a2) % n])
            t += w.table[static_cast<std::size_t>(a1) * n + a2];
      }
    }
  return t;
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

double correlation_dot_fft(const TorusConfig& cfg, const PeriodizedKernel& w) {
  const int n = cfg.n;
  const std::size_t nd = cfg.size();
  const std::size_t nc =
      cfg.d == 1 ? (n / 2 + 1) : static_cast<std::size_t>(n) * (n / 2 + 1);
  double* real = fftw_alloc_real(nd);
  fftw_complex* fa = fftw_alloc_complex(nc);
  fftw_complex* fb = fftw_alloc_complex(nc);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fwd = cfg.d == 1 ? fftw_plan_dft_r2c_1d(n, real, fa, FFTW_ESTIMATE)
                     : fftw_plan_dft_r2c_2d(n, n, real, fa, FFTW_ESTIMATE);
    bwd = cfg.d == 1 ? fftw_plan_dft_c2r_1d(n, fa, real, FFTW_ESTIMATE)
                     : fftw_plan_dft_c2r_2d(n, n, fa, real, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < nd; ++i) real[i] = cfg.cells[i];
  fftw_execute(fwd);
  for (std::size_t i = 0; i < nc; ++i) {
    fb[i][0] = fa[i][0];
    fb[i][1] = fa[i][1];
  }
  for (std::size_t i = 0; i < nd; ++i) real[i] = w.table[i];
  fftw_execute(fwd);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(bwd);
  double t = 0;
  for (std::size_t i = 0; i < nd; ++i)
    if (cfg.cells[i]) t += real[i];
  t /= static_cast<double>(nd);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(real);
  fftw_free(fa);
  fftw_free(fb);
  return t;
}

// Slice plus per-axis facet tally for the decomposition.
double g_axis_sum(const TorusConfig& cfg, const KernelSpec& spec, int axis,
                  long long& facets) {
  facets = 0;
  if (cfg.d == 1) {
    const Slice1D sl = slice(cfg, 0, {});
    facets = static_cast<long long>(sl.jumps.size());
    return g1d_deficit(sl, spec, cfg.spacing);
  }
  double acc = 0;
  for (int i = 0; i < cfg.n; ++i) {
    const int idx[1] = {i};
    const Slice1D sl = slice(cfg, axis, idx);
    facets += static_cast<long long>(sl.jumps.size());
    acc += g1d_deficit(sl, spec, cfg.spacing);
  }
  return cfg.spacing * acc;
}

}  // namespace

// ---------------------------------------------------------------------------

double jc_dsc(int d, double p, double tol) {
  if (d < 1) throw std::invalid_argument("jc_dsc: d must be >= 1");
  if (!(p >= d + 2))
    throw std::invalid_argument("jc_dsc: requires p >= d + 2");
  if (!(tol > 0)) throw std::invalid_argument("jc_dsc: tol must be > 0");
  if (d > 2)
    throw std::invalid_argument("jc_dsc: implemented for d in {1, 2}");
  if (d == 1) {
    // sum_{y >= 1} y^(1-p): direct terms plus an exact Hurwitz zeta tail.
    const int ylim = 64;
    double s = 0;
    for (int y = ylim; y >= 1; --y) s += std::pow(y, 1 - p);
    s += hurwitz_zeta(p - 1, ylim + 1);
    const double achieved = 8e-15 * s;
    if (achieved > tol)
      throw tolerance_error("jc_dsc: cannot certify tolerance " +
                            std::to_string(tol));
    return s;
  }
  // d == 2: sum_{t >= 1} t g_p(t).  Beyond t = T the line sums collapse to
  // cp t^(1-p) with exponentially small relative error (Poisson summation),
  // so the tail closes to an exact Hurwitz zeta value; the stated remainder
  // bound is generous.
  const int tlim = 24;
  double s = 0;
  for (int t = 1; t <= tlim; ++t) s += t * line_sum(p, t);
  const double cp = line_collapse_constant(p);
  const double tail = cp * hurwitz_zeta(p - 2, tlim + 1);
  s += tail;
  const double rem =
      tail * 8 * M_PI * (tlim + 1) * std::exp(-2 * M_PI * (tlim + 1));
  const double achieved = 4e-14 * s + rem;
  if (achieved > tol)
    throw tolerance_error("jc_dsc: cannot certify tolerance " +
                          std::to_string(tol));
  return s;
}

double hat_pair_integral(double p, double cg, int j1, int j2) {
  if (j1 < 0 || j2 < 0)
    throw std::invalid_argument("hat_pair_integral: offsets must be >= 0");
  if (!(p > 1))
    throw std::invalid_argument("hat_pair_integral: requires p > 1");
  if (!(cg >= 0))
    throw std::invalid_argument("hat_pair_integral: requires cg >= 0");
  const TentStencils st(p, cg);
  if (j1 == 0 && j2 == 0) return st.corner();
  if (j1 == 0) return st.edge(j2);
  if (j2 == 0) return st.edge(j1);
  return st.pair(static_cast<double>(j1) + j2);
}

double jc_continuum(int d, double p) {
  if (d < 1) throw std::invalid_argument("jc_continuum: d must be >= 1");
  if (!(p > d + 1))
    throw std::invalid_argument("jc_continuum: requires p > d + 1");
  double cq = 1;
  for (int j = 1; j <= d - 1; ++j) cq *= 2 / (p - j);
  const double q = p - d + 1;
  return 2 * cq / ((q - 1) * (q - 2));
}

double energy_dsc(const TorusConfig& cfg, double J, const PeriodizedKernel& W,
                  ConvPath path) {
  if (cfg.d > 2)
    throw std::invalid_argument("energy_dsc: implemented for d in {1, 2}");
  if (W.d != cfg.d || W.n != cfg.n)
    throw std::invalid_argument("energy_dsc: kernel table torus mismatch");
  if (std::abs(W.spacing - 1) > 1e-12 || std::abs(cfg.spacing - 1) > 1e-12)
    throw std::invalid_argument("energy_dsc: requires unit spacing");
  const std::size_t nd = cfg.size();
  const bool direct =
      path == ConvPath::Direct || (path == ConvPath::Auto && nd <= 4096);
  const double t = direct ? correlation_dot_direct(cfg, W)
                          : correlation_dot_fft(cfg, W);
  const double pair_sum = 2 * (static_cast<double>(cfg.count()) * W.sum() - t);
  return (J * perimeter_1(cfg) - pair_sum) / static_cast<double>(nd);
}

double energy_rescaled_dsc(const TorusConfig& cfg, const KernelSpec& spec) {
  if (cfg.d != spec.d)
    throw std::invalid_argument("energy_rescaled_dsc: dimension mismatch");
  if (!(spec.tau > 0))
    throw std::invalid_argument("energy_rescaled_dsc: requires tau > 0");
  const double kappa = spec.range();
  if (std::abs(cfg.spacing - kappa) > 1e-9 * std::max(1.0, kappa))
    throw std::invalid_argument(
        "energy_rescaled_dsc: cfg.spacing must equal tau^(1/beta)");
  TorusConfig unit = cfg;
  unit.spacing = 1;
  const KernelSpec flat(spec.d, spec.p, 0, KernelFamily::Euclidean);
  const PeriodizedKernel w = periodize(flat, cfg.n, 1.0, 1e-12);
  const double coupling = jc_dsc(spec.d, spec.p, 1e-12) - spec.tau;
  return std::pow(spec.tau, -(spec.p - spec.d) / spec.beta()) *
         energy_dsc(unit, coupling, w);
}

double g1d_deficit(const Slice1D& sl, const KernelSpec& spec, double spacing) {
  if (sl.jumps.empty()) return 0;
  const double period = sl.period;
  const double jumps = static_cast<double>(sl.jumps.size());
  const PiecewiseLinear ov = overlap_function(slice_intervals(sl), period);
  if (spec.family == KernelFamily::OneNorm) {
    PiecewiseLinear deficit;
    deficit.x = ov.x;
    deficit.y.resize(ov.y.size());
    for (std::size_t i = 0; i < ov.x.size(); ++i)
      deficit.y[i] = jumps * ov.x[i] - ov.y[i];
    return 2 * kernel_weighted_integral(deficit, jumps * period, spec.q(),
                                        spec.range(), spec.cq());
  }
  // Euclidean lattice collapse: displacement z ranges over spacing * Z.
  if (!(spacing > 0))
    throw std::invalid_argument(
        "g1d_deficit: Euclidean family requires the lattice spacing");
  const double ratio = period / spacing;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(
        "g1d_deficit: period must be an integer multiple of spacing");
  const double p = spec.p;
  if (spec.d == 1) {
    // Khat(z) = spacing * |z|^(-p); image sums close to Hurwitz zeta values:
    // sum_{k>=0} (s+nk)^(-p) and sum_{k>=0} k (s+nk)^(-p).
    double acc = 0;
    for (int s = 1; s <= n; ++s) {
      const double a = static_cast<double>(s) / n;
      const double zh0 = hurwitz_zeta(p, a);
      const double zh1 = hurwitz_zeta(p - 1, a) - a * zh0;
      const double deficit = jumps * (spacing * s) - ov(spacing * s);
      acc += deficit * zh0 + jumps * period * zh1;
    }
    return 2 * std::pow(spacing, 1 - p) * std::pow(n, -p) * acc;
  }
  if (spec.d != 2)
    throw std::invalid_argument("g1d_deficit: implemented for d in {1, 2}");
  // d = 2: Khat(spacing * a) = spacing^(2-p) g_p(a); direct terms while
  // a <= 40, then cp-collapse tails (exponentially accurate).
  const double cp = line_collapse_constant(p);
  const int direct_limit = 40;
  double acc = 0;
  for (int s = 1; s <= n; ++s) {
    const double deficit = jumps * (spacing * s) - ov(spacing * s);
    double gh0 = 0, gh1 = 0;
    int k = 0;
    for (; s + n * k <= direct_limit; ++k) {
      const double g = line_sum(p, s + n * k);
      gh0 += g;
      gh1 += k * g;
    }
    const double a = static_cast<double>(s) / n + k;
    const double zh0 = hurwitz_zeta(p - 1, a);
    const double zh1 = hurwitz_zeta(p - 2, a) - (static_cast<double>(s) / n) *
                                                    hurwitz_zeta(p - 1, a);
    gh0 += cp * std::pow(n, 1 - p) * zh0;
    gh1 += cp * std::pow(n, 1 - p) * zh1;
    acc += deficit * gh0 + jumps * period * gh1;
  }
  return 2 * std::pow(spacing, 2 - p) * acc;
}

std::vector<std::pair<std::string, double>> breakdown_fields(
    const EnergyBreakdown& bd) {
  std::vector<std::pair<std::string, double>> out;
  out.emplace_back("perimeter_term", bd.perimeter_term);
  for (std::size_t i = 0; i < bd.g.size(); ++i)
    out.emplace_back("g_" + std::to_string(i + 1), bd.g[i]);
  for (std::size_t i = 0; i < bd.i_cross.size(); ++i)
    out.emplace_back("i_" + std::to_string(i + 1), bd.i_cross[i]);
  out.emplace_back("total", bd.total);
  out.emplace_back("lower_bound", bd.lower_bound);
  out.emplace_back("residual", bd.residual);
  return out;
}

EnergyBreakdown decompose(const TorusConfig& cfg, const KernelSpec& spec) {
  if (cfg.d != spec.d)
    throw std::invalid_argument("decompose: dimension mismatch");
  if (cfg.d > 2)
    throw std::invalid_argument("decompose: implemented for d in {1, 2}");
  if (!(cfg.spacing > 0))
    throw std::invalid_argument("decompose: spacing must be positive");
  const int d = cfg.d;
  const int n = cfg.n;
  const double kappa = cfg.spacing;
  const double side = cfg.side();
  const double vol = std::pow(side, d);
  const long long cnt = static_cast<long long>(cfg.count());

  EnergyBreakdown bd;
  bd.g.resize(d);
  bd.i_cross.assign(d, 0.0);
  long long facets[2] = {0, 0};
  for (int axis = 0; axis < d; ++axis)
    bd.g[axis] = g_axis_sum(cfg, spec, axis, facets[axis]);

  if (spec.family == KernelFamily::OneNorm) {
    // Continuum energy of the cell union; boundary measure counted once.
    bd.perimeter_term = perimeter_1(cfg) / 2;
    const double c = spec.range();
    const double q = spec.q();
    const double cqv = spec.cq();
    if (d == 2) {
      const auto corr = autocorrelation(cfg);
      const HatQuadrantTable hat = build_hat_table(spec.p, n, kappa, c);
      // Cross-direction term: int K M with M the coincidence overlap, an
      // exactly piecewise-bilinear function whose fold4 the table entries
      // integrate.  Zero-weight entries are skipped so that the divergent
      // small-offset entries at tau = 0 only contribute where crossing
      // interfaces are genuinely present.
      double cross = 0;
      for (int s1 = 0; s1 < n; ++s1)
        for (int s2 = 0; s2 < n; ++s2) {
          const long long wgt = fold4_cross(corr, n, cnt, s1, s2);
          if (wgt != 0) cross += static_cast<double>(wgt) * hat.at(s1, s2);
        }
      const double icross = kappa * kappa * hat.scale * cross;
      bd.i_cross[0] = bd.i_cross[1] = icross;
      bd.lower_bound =
          (-bd.perimeter_term + bd.g[0] + bd.g[1] + 2 * icross) / vol;
      if (c > 0) {
        // Direct expression: perimeter first moment minus pair overlap.
        const double moment = khat_abs_moment(q, c, cqv);
        const double kernel_mass = 2 * cqv * std::pow(c, 1 - q) / (q - 1);
        double pair = 0;
        for (int s1 = 0; s1 < n; ++s1)
          for (int s2 = 0; s2 < n; ++s2) {
            const long long wgt = fold4_corr(corr, n, s1, s2);
            if (wgt != 0) pair += static_cast<double>(wgt) * hat.at(s1, s2);
          }
        pair *= kappa * kappa * hat.scale;
        const double mass = kappa * kappa * static_cast<double>(cnt);
        const double overlap_sum = 2 * mass * kernel_mass - 2 * pair;
        const double boundary = kappa * (facets[0] + facets[1]);
        bd.total =
            (-bd.perimeter_term + moment * boundary - overlap_sum) / vol;
        bd.residual = bd.total - bd.lower_bound;
      } else {
        // tau = 0: the moment and mass integrals diverge separately; the
        // decomposition itself is the defining (finite or +inf) value.
        bd.total = bd.lower_bound;
        bd.residual = 0;
      }
    } else {  // d == 1
      bd.i_cross[0] = 0;
      bd.lower_bound = (-bd.perimeter_term + bd.g[0]) / vol;
      if (c > 0) {
        const Slice1D sl = slice(cfg, 0, {});
        const PiecewiseLinear ov =
            overlap_function(slice_intervals(sl), side);
        const double overlap_sum =
            2 * kernel_weighted_integral(ov, 0, q, c, cqv);
        const double moment = khat_abs_moment(q, c, cqv);
        bd.total = (-bd.perimeter_term + moment * bd.perimeter_term -
                    overlap_sum) /
                   vol;
        bd.residual = bd.total - bd.lower_bound;
      } else {
        bd.total = bd.lower_bound;
        bd.residual = 0;
      }
    }
    return bd;
  }

  // Euclidean family: rescaled lattice energy at the configuration's own
  // spacing; ordered-pair perimeter convention.
  bd.perimeter_term = perimeter_1(cfg);
  const double p = spec.p;
  const double jc = jc_dsc(d, p, 1e-12);
  const auto corr = autocorrelation(cfg);
  const KernelSpec flat(d, p, 0, KernelFamily::Euclidean);
  const PeriodizedKernel w = periodize(flat, n, 1.0, 1e-12);
  // Disagreement contraction sum_{a != 0} |a|^(-p) * 2(cnt - C(a)); the
  // offset-0 entry pairs with a zero count.
  double pair_cnt = 0;
  for (std::size_t i = 0; i < w.table.size(); ++i)
    pair_cnt += w.table[i] * 2 * static_cast<double>(cnt - corr[i]);
  const double facet_total = static_cast<double>(facets[0] + facets[1]);
  const double scale = std::pow(kappa, 2 * d - p);
  bd.total = (-bd.perimeter_term +
              scale * (2 * jc * facet_total - pair_cnt)) /
             vol;
  if (d == 2) {
    double cross_cnt = 0;
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = 0; s2 < n; ++s2) {
        const long long m1 = (n - s1) % n;
        const long long mcnt = cnt - corr[s2] -
                               corr[static_cast<std::size_t>(s1) * n] +
                               corr[static_cast<std::size_t>(m1) * n + s2];
        cross_cnt += static_cast<double>(mcnt) *
                     w.table[static_cast<std::size_t>(s1) * n + s2];
      }
    const double icross = scale * cross_cnt;
    bd.i_cross[0] = bd.i_cross[1] = icross;
  }
  double parts = -bd.perimeter_term;
  for (int i = 0; i < d; ++i) parts += bd.g[i] + bd.i_cross[i];
  bd.lower_bound = parts / vol;
  bd.residual = bd.total - bd.lower_bound;
  return bd;
}

}  // namespace stripes
