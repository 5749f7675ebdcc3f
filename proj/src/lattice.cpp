// Torus configurations, perimeter, slices, stripes, canonical forms, grid io.
#include "stripes/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stripes {

namespace {

std::size_t ipow(int n, int d) {
  std::size_t r = 1;
  for (int i = 0; i < d; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

void decode(std::size_t flat, int d, int n, std::span<int> out) {
  for (int a = d - 1; a >= 0; --a) {
    out[a] = static_cast<int>(flat % n);
    flat /= n;
  }
}

}  // namespace

TorusConfig::TorusConfig(int d_, int n_, double kappa)
    : d(d_), n(n_), spacing(kappa) {
  if (d < 1 || d > 3) throw std::invalid_argument("TorusConfig: d must be 1..3");
  if (n < 1) throw std::invalid_argument("TorusConfig: n must be >= 1");
  if (!(kappa > 0))
    throw std::invalid_argument("TorusConfig: spacing must be positive");
  cells.assign(ipow(n, d), 0);
}

std::size_t TorusConfig::index(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("TorusConfig::index: dimension mismatch");
  std::size_t idx = 0;
  for (int a = 0; a < d; ++a) {
    int r = x[a] % n;
    if (r < 0) r += n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(r);
  }
  return idx;
}

std::size_t TorusConfig::count() const {
  std::size_t m = 0;
  for (auto c : cells) m += c;
  return m;
}

TorusConfig complement(const TorusConfig& cfg) {
  TorusConfig out = cfg;
  for (auto& c : out.cells) c = c ? 0 : 1;
  return out;
}

double perimeter_1(const TorusConfig& cfg) {
  std::size_t total = cfg.size();
  std::size_t disagree = 0;
  // stride of axis a in the row-major layout
  std::vector<std::size_t> stride(cfg.d);
  std::size_t s = 1;
  for (int a = cfg.d - 1; a >= 0; --a) {
    stride[a] = s;
    s *= static_cast<std::size_t>(cfg.n);
  }
  std::vector<int> x(cfg.d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    decode(flat, cfg.d, cfg.n, x);
    for (int a = 0; a < cfg.d; ++a) {
      std::size_t nb = x[a] + 1 == cfg.n ? flat - stride[a] * (cfg.n - 1)
                                         : flat + stride[a];
      if (cfg.cells[flat] != cfg.cells[nb]) ++disagree;
    }
  }
  return 2.0 * static_cast<double>(disagree) *
         std::pow(cfg.spacing, cfg.d - 1);
}

Slice1D slice(const TorusConfig& cfg, int axis, std::span<const int> index) {
  if (axis < 0 || axis >= cfg.d)
    throw std::invalid_argument("slice: axis out of range");
  if (static_cast<int>(index.size()) != cfg.d - 1)
    throw std::invalid_argument("slice: index must have d-1 coordinates");
  std::vector<int> x(cfg.d);
  int j = 0;
  for (int a = 0; a < cfg.d; ++a)
    if (a != axis) x[a] = index[j++];
  Slice1D out;
  out.period = cfg.side();
  x[axis] = 0;
  out.starts_inside = cfg.at(x);
  for (int t = 0; t < cfg.n; ++t) {
    x[axis] = t;
    bool here = cfg.at(x);
    x[axis] = t + 1;
    bool next = cfg.at(x);
    if (here != next) out.jumps.push_back(cfg.spacing * (t + 0.5));
  }
  return out;
}

double eta(const Slice1D& sl, double s, double z) {
  if (sl.jumps.empty())
    throw std::invalid_argument("eta: slice has no boundary points");
  auto it = std::lower_bound(sl.jumps.begin(), sl.jumps.end(),
                             s - 1e-9 * sl.period);
  if (it == sl.jumps.end() || std::abs(*it - s) > 1e-9 * sl.period)
    throw std::invalid_argument("eta: s is not a jump of the slice");
  std::size_t i = static_cast<std::size_t>(it - sl.jumps.begin());
  std::size_t m = sl.jumps.size();
  double prev = i == 0 ? sl.jumps[m - 1] - sl.period : sl.jumps[i - 1];
  double next = i + 1 == m ? sl.jumps[0] + sl.period : sl.jumps[i + 1];
  double zp = std::max(z, 0.0);
  double zm = std::max(-z, 0.0);
  return std::min(zp, *it - prev) + std::min(zm, next - *it);
}

TorusConfig make_stripes(const StripeSpec& spec, int d, int n, double kappa) {
  if (spec.direction < 0 || spec.direction >= d)
    throw std::invalid_argument("make_stripes: direction out of range");
  if (!(spec.width > 0))
    throw std::invalid_argument("make_stripes: width must be positive");
  double w2 = 2 * spec.width / kappa;
  long w2i = std::llround(w2);
  if (std::abs(w2 - w2i) > 1e-9 || w2i < 1)
    throw std::invalid_argument(
        "make_stripes: 2*width must be an integer multiple of the spacing");
  if (n % w2i != 0)
    throw std::invalid_argument(
        "make_stripes: the stripe period 2*width must divide the torus side");
  TorusConfig out(d, n, kappa);
  long hk = 0;  // width in cells when exactly representable
  double hkf = spec.width / kappa;
  bool integral = std::abs(hkf - std::llround(hkf)) < 1e-9;
  if (integral) hk = std::llround(hkf);
  double nuk = spec.phase / kappa;
  bool nu_integral = std::abs(nuk - std::llround(nuk)) < 1e-9;
  std::vector<int> x(d);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    decode(flat, d, n, x);
    int j = x[spec.direction];
    bool in;
    if (integral && nu_integral) {
      long r = (j - std::llround(nuk)) % w2i;
      if (r < 0) r += w2i;
      in = r < hk;
    } else {
      double u = std::fmod(kappa * j - spec.phase, 2 * spec.width);
      if (u < 0) u += 2 * spec.width;
      in = u < spec.width;
    }
    out.cells[flat] = in ? 1 : 0;
  }
  return out;
}

TorusConfig canonical_form(const TorusConfig& cfg) {
  int d = cfg.d, n = cfg.n;
  std::size_t total = cfg.size();
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint8_t> best = cfg.cells;
  std::vector<std::uint8_t> cand(total);
  std::vector<int> x(d), y(d), t(d);
  do {
    for (int refl = 0; refl < (1 << d); ++refl) {
      std::fill(t.begin(), t.end(), 0);
      while (true) {
        for (int flip = 0; flip < 2; ++flip) {
          for (std::size_t flat = 0; flat < total; ++flat) {
            decode(flat, d, n, x);
            for (int a = 0; a < d; ++a) {
              int v = x[a];
              if (refl & (1 << a)) v = (n - v) % n;
              v += t[a];
              if (v >= n) v -= n;
              y[perm[a]] = v;
            }
            std::uint8_t val = cfg.cells[cfg.index(y)];
            cand[flat] = flip ? (val ? 0 : 1) : val;
          }
          if (cand < best) best = cand;
        }
        int a = d - 1;
        while (a >= 0 && ++t[a] == n) t[a--] = 0;
        if (a < 0) break;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  TorusConfig out = cfg;
  out.cells = std::move(best);
  return out;
}

StripeCheck stripe_check(const TorusConfig& cfg) {
  StripeCheck out;
  bool constant =
      std::all_of(cfg.cells.begin(), cfg.cells.end(),
                  [&](std::uint8_t c) { return c == cfg.cells[0]; });
  if (constant) {
    out.is_stripe = true;
    return out;
  }
  std::vector<int> x(cfg.d), rep(cfg.d);
  for (int axis = 0; axis < cfg.d; ++axis) {
    bool ok = true;
    for (std::size_t flat = 0; flat < cfg.size() && ok; ++flat) {
      decode(flat, cfg.d, cfg.n, x);
      std::fill(rep.begin(), rep.end(), 0);
      rep[axis] = x[axis];
      if (cfg.cells[flat] != cfg.cells[cfg.index(rep)]) ok = false;
    }
    if (!ok) continue;
    out.is_stripe = true;
    out.direction = axis;
    // Line profile along the axis.
    std::vector<std::uint8_t> line(cfg.n);
    for (int j = 0; j < cfg.n; ++j) {
      std::fill(rep.begin(), rep.end(), 0);
      rep[axis] = j;
      line[j] = cfg.cells[cfg.index(rep)];
    }
    // Runs of equal values around the circle.
    int start = 0;
    while (start < cfg.n && line[(start + cfg.n - 1) % cfg.n] == line[start])
      ++start;
    if (start == cfg.n) break;  // constant handled above
    std::vector<int> run_start, run_len;
    std::vector<std::uint8_t> run_val;
    int pos = start;
    do {
      int len = 1;
      while (line[(pos + len) % cfg.n] == line[pos % cfg.n]) ++len;
      run_start.push_back(pos % cfg.n);
      run_len.push_back(len);
      run_val.push_back(line[pos % cfg.n]);
      pos += len;
    } while ((pos - start) < cfg.n);
    bool equal = std::all_of(run_len.begin(), run_len.end(),
                             [&](int l) { return l == run_len[0]; });
    if (equal && run_len.size() >= 2) {
      out.is_periodic_stripe = true;
      out.spec.direction = axis;
      out.spec.width = run_len[0] * cfg.spacing;
      for (std::size_t r = 0; r < run_val.size(); ++r)
        if (run_val[r]) {
          double nu = run_start[r] * cfg.spacing;
          out.spec.phase = std::fmod(nu, 2 * out.spec.width);
          break;
        }
    }
    break;
  }
  return out;
}

void write_grid(const TorusConfig& cfg, std::ostream& out) {
  std::ostringstream header;
  header.precision(17);
  header << cfg.d << ' ' << cfg.n << ' ' << cfg.spacing << '\n';
  out << header.str();
  std::size_t rows = ipow(cfg.n, cfg.d - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int c = 0; c < cfg.n; ++c)
      out.put(cfg.cells[r * static_cast<std::size_t>(cfg.n) + c] ? '1' : '0');
    out.put('\n');
  }
}

TorusConfig read_grid(std::istream& in) {
  int d = 0, n = 0;
  double kappa = 0;
  if (!(in >> d >> n >> kappa))
    throw std::invalid_argument("read_grid: malformed header");
  TorusConfig cfg(d, n, kappa);
  std::size_t rows = ipow(n, d - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string row;
    if (!(in >> row) || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("read_grid: bad row length");
    for (int c = 0; c < n; ++c) {
      if (row[c] != '0' && row[c] != '1')
        throw std::invalid_argument("read_grid: rows must be 0/1 characters");
      cfg.cells[r * static_cast<std::size_t>(n) + c] = row[c] == '1' ? 1 : 0;
    }
  }
  return cfg;
}

void write_grid_file(const TorusConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_grid_file: cannot open " + path);
  write_grid(cfg, out);
}

TorusConfig read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_grid_file: cannot open " + path);
  return read_grid(in);
}

}  // namespace stripes
