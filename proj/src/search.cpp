// Ground-state searches: exhaustive Gray-code enumeration with incremental
// flip updates (threaded over the index space), stripe-width scans, and
// Metropolis annealing with a zero-temperature finishing descent.
#include "stripes/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

namespace stripes {

namespace {

// Ordered-pair perimeter change caused by flipping one cell: every neighbor
// agreeing with the old value gains a disagreement and vice versa, each
// counted twice (ordered pairs).  On the n = 1 torus all neighbors are the
// cell itself and nothing changes.
int flip_perimeter_change(const TorusConfig& cfg, std::size_t cell) {
  const int n = cfg.n;
  if (n == 1) return 0;
  const std::uint8_t a = cfg.cells[cell];
  int diff = 0;
  if (cfg.d == 1) {
    const int x = static_cast<int>(cell);
    diff += cfg.cells[(x + 1) % n] != a;
    diff += cfg.cells[(x + n - 1) % n] != a;
  } else {
    const int x1 = static_cast<int>(cell) / n;
    const int x2 = static_cast<int>(cell) % n;
    diff += cfg.cells[static_cast<std::size_t>((x1 + 1) % n) * n + x2] != a;
    diff +=
        cfg.cells[static_cast<std::size_t>((x1 + n - 1) % n) * n + x2] != a;
    diff += cfg.cells[static_cast<std::size_t>(x1) * n + (x2 + 1) % n] != a;
    diff +=
        cfg.cells[static_cast<std::size_t>(x1) * n + (x2 + n - 1) % n] != a;
  }
  return 2 * (2 * cfg.d - 2 * diff);
}

TorusConfig mask_config(int d, int n, std::uint64_t mask) {
  TorusConfig cfg(d, n, 1.0);
  for (std::size_t i = 0; i < cfg.size(); ++i)
    cfg.cells[i] = (mask >> i) & 1u ? 1 : 0;
  return cfg;
}

struct EnumHit {
  double energy;  // screening energy (incremental, small drift)
  std::uint64_t mask;
};

// Walks configurations g(k) = k xor (k >> 1) for k in [lo, hi) and returns
// every configuration whose screening energy comes within `band` of the
// running minimum of the range.  The returned set is a superset of the
// range's true minimizers as long as the incremental drift stays below
// `band`, which the periodic refresh guarantees with orders to spare.
std::vector<EnumHit> enumerate_range(int d, int n, double J,
                                     const PeriodizedKernel& W, double scale,
                                     std::uint64_t lo, std::uint64_t hi,
                                     double band) {
  std::uint64_t g = lo ^ (lo >> 1);
  FlipEngine eng(mask_config(d, n, g), J, W);
  double best = std::numeric_limits<double>::infinity();
  std::vector<EnumHit> hits;
  for (std::uint64_t k = lo; k < hi; ++k) {
    if (((k - lo) & 8191u) == 8191u) eng.refresh();
    const double e = scale * eng.energy();
    if (e < best - band) {
      best = e;
      std::erase_if(hits,
                    [&](const EnumHit& h) { return h.energy > best + band; });
      hits.push_back({e, g});
    } else if (e <= best + band) {
      hits.push_back({e, g});
      if (hits.size() > (std::size_t{1} << 18))
        throw std::runtime_error(
            "enumerate_ground_states: near-degenerate tie set exceeds "
            "capacity");
    }
    if (k + 1 < hi) {
      const int bit = std::countr_zero(k + 1);
      eng.flip(static_cast<std::size_t>(bit));
      g ^= std::uint64_t{1} << bit;
    }
  }
  return hits;
}

void check_enumeration_budget(int d, int n) {
  if (d != 1 && d != 2)
    throw std::invalid_argument(
        "enumerate_ground_states: implemented for d in {1, 2}");
  if (n < 1)
    throw std::invalid_argument("enumerate_ground_states: need n >= 1");
  if ((d == 1 && n > 20) || (d == 2 && n > 5))
    throw std::invalid_argument(
        "enumerate_ground_states: exhaustive budget exceeded "
        "(d = 1 allows n <= 20, d = 2 allows n <= 5)");
}

// Shared enumeration driver: screens all 2^(n^d) configurations with the
// incremental engine, then re-evaluates the surviving candidates with the
// exact calculator and reports the canonical minimizer classes.
SearchReport enumerate_core(
    int d, int n, double J, double p, double scale, double spacing,
    const std::function<double(TorusConfig)>& exact) {
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= static_cast<std::size_t>(n);
  const std::uint64_t total = std::uint64_t{1} << cells;
  const KernelSpec flat(d, p, 0, KernelFamily::Euclidean);
  const PeriodizedKernel W = periodize(flat, n, 1.0, 1e-12);
  const double band = 1e-9;

  unsigned workers = worker_count();
  if (total < (std::uint64_t{1} << 18)) workers = 1;

  std::vector<std::vector<EnumHit>> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = total / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = (w + 1 == workers) ? total : lo + chunk;
    pool.emplace_back([&, w, lo, hi] {
      try {
        parts[w] = enumerate_range(d, n, J, W, scale, lo, hi, band);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  double best = std::numeric_limits<double>::infinity();
  std::vector<EnumHit> evals;
  for (const auto& part : parts)
    for (const EnumHit& h : part) {
      const double e = exact(mask_config(d, n, h.mask));
      evals.push_back({e, h.mask});
      best = std::min(best, e);
    }

  SearchReport rep;
  rep.method = SearchMethod::Exhaustive;
  rep.best_energy = best;
  rep.visited = static_cast<long long>(total);
  std::vector<TorusConfig> canon;
  for (const EnumHit& h : evals) {
    if (h.energy > best + 1e-12) continue;
    TorusConfig cfg = mask_config(d, n, h.mask);
    cfg.spacing = spacing;
    canon.push_back(canonical_form(cfg));
  }
  std::sort(canon.begin(), canon.end(),
            [](const TorusConfig& a, const TorusConfig& b) {
              return a.cells < b.cells;
            });
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  rep.minimizers = std::move(canon);
  for (const TorusConfig& m : rep.minimizers) {
    const StripeCheck sc = stripe_check(m);
    rep.is_stripe.push_back(sc.is_stripe);
    if (!rep.stripe_spec && sc.is_periodic_stripe) rep.stripe_spec = sc.spec;
  }
  return rep;
}

}  // namespace

FlipEngine::FlipEngine(const TorusConfig& start, double J,
                       const PeriodizedKernel& W)
    : cfg_(start), w_(W), j_(J) {
  if (cfg_.d != 1 && cfg_.d != 2)
    throw std::invalid_argument("FlipEngine: implemented for d in {1, 2}");
  if (std::abs(cfg_.spacing - 1) > 1e-12 || std::abs(w_.spacing - 1) > 1e-12)
    throw std::invalid_argument("FlipEngine: requires unit spacing");
  if (w_.d != cfg_.d || w_.n != cfg_.n)
    throw std::invalid_argument("FlipEngine: kernel table torus mismatch");
  wsum_ = w_.sum();
  phi_.assign(cfg_.size(), 0.0);
  refresh();
}

void FlipEngine::refresh() {
  const int n = cfg_.n;
  std::fill(phi_.begin(), phi_.end(), 0.0);
  cnt_ = 0;
  for (std::size_t c = 0; c < cfg_.size(); ++c) cnt_ += cfg_.cells[c] ? 1 : 0;
  if (cfg_.d == 1) {
    for (int y = 0; y < n; ++y) {
      if (!cfg_.cells[y]) continue;
      for (int x = 0; x < n; ++x) phi_[x] += w_.table[(x - y + n) % n];
    }
  } else {
    for (int y1 = 0; y1 < n; ++y1)
      for (int y2 = 0; y2 < n; ++y2) {
        if (!cfg_.cells[static_cast<std::size_t>(y1) * n + y2]) continue;
        for (int x1 = 0; x1 < n; ++x1) {
          const std::size_t row = static_cast<std::size_t>(x1) * n;
          const std::size_t wrow =
              static_cast<std::size_t>((x1 - y1 + n) % n) * n;
          for (int x2 = 0; x2 < n; ++x2)
            phi_[row + x2] += w_.table[wrow + (x2 - y2 + n) % n];
        }
      }
  }
  tsum_ = 0;
  for (std::size_t c = 0; c < cfg_.size(); ++c)
    if (cfg_.cells[c]) tsum_ += phi_[c];
  per_ = std::llround(perimeter_1(cfg_));
}

double FlipEngine::energy() const {
  const double pair_sum = 2 * (static_cast<double>(cnt_) * wsum_ - tsum_);
  return (j_ * static_cast<double>(per_) - pair_sum) /
         static_cast<double>(cfg_.size());
}

double FlipEngine::delta(std::size_t cell) const {
  const double eps = cfg_.cells[cell] ? -1.0 : 1.0;
  const double dper = flip_perimeter_change(cfg_, cell);
  const double dt = 2 * eps * phi_[cell] + w_.table[0];
  const double dpair = 2 * (eps * wsum_ - dt);
  return (j_ * dper - dpair) / static_cast<double>(cfg_.size());
}

void FlipEngine::flip(std::size_t cell) {
  const int n = cfg_.n;
  const std::uint8_t a = cfg_.cells[cell];
  const double eps = a ? -1.0 : 1.0;
  per_ += flip_perimeter_change(cfg_, cell);
  tsum_ += 2 * eps * phi_[cell] + w_.table[0];
  cnt_ += a ? -1 : 1;
  cfg_.cells[cell] = a ? 0 : 1;
  if (cfg_.d == 1) {
    const int c = static_cast<int>(cell);
    for (int x = 0; x < n; ++x) phi_[x] += eps * w_.table[(x - c + n) % n];
  } else {
    const int c1 = static_cast<int>(cell) / n;
    const int c2 = static_cast<int>(cell) % n;
    for (int x1 = 0; x1 < n; ++x1) {
      const std::size_t row = static_cast<std::size_t>(x1) * n;
      const std::size_t wrow = static_cast<std::size_t>((x1 - c1 + n) % n) * n;
      for (int x2 = 0; x2 < n; ++x2)
        phi_[row + x2] += eps * w_.table[wrow + (x2 - c2 + n) % n];
    }
  }
}

SearchReport enumerate_ground_states(int d, int n, double J, double p) {
  check_enumeration_budget(d, n);
  const PeriodizedKernel W =
      periodize(KernelSpec(d, p, 0, KernelFamily::Euclidean), n, 1.0, 1e-12);
  return enumerate_core(d, n, J, p, 1.0, 1.0, [&](TorusConfig cfg) {
    return energy_dsc(cfg, J, W, ConvPath::Direct);
  });
}

SearchReport enumerate_ground_states(int n, const KernelSpec& spec) {
  check_enumeration_budget(spec.d, n);
  if (!(spec.tau > 0))
    throw std::invalid_argument("enumerate_ground_states: requires tau > 0");
  const double scale =
      std::pow(spec.tau, -(spec.p - spec.d) / spec.beta());
  const double coupling = jc_dsc(spec.d, spec.p, 1e-12) - spec.tau;
  return enumerate_core(spec.d, n, coupling, spec.p, scale, spec.range(),
                        [&](TorusConfig cfg) {
                          cfg.spacing = spec.range();
                          return energy_rescaled_dsc(cfg, spec);
                        });
}

SearchReport stripe_scan(int n, const KernelSpec& spec) {
  if (spec.d != 1 && spec.d != 2)
    throw std::invalid_argument("stripe_scan: implemented for d in {1, 2}");
  if (!(spec.tau > 0))
    throw std::invalid_argument("stripe_scan: requires tau > 0");
  if (n < 1) throw std::invalid_argument("stripe_scan: need n >= 1");
  const double kappa = spec.range();
  std::vector<std::tuple<double, StripeSpec, TorusConfig>> evals;
  for (int m = 1; 2 * m <= n; ++m) {
    if (n % (2 * m) != 0) continue;
    const StripeSpec sp{0, m * kappa, 0.0};
    TorusConfig cfg = make_stripes(sp, spec.d, n, kappa);
    evals.emplace_back(energy_rescaled_dsc(cfg, spec), sp, cfg);
  }
  SearchReport rep;
  rep.method = SearchMethod::StripeScan;
  rep.visited = static_cast<long long>(evals.size());
  rep.best_energy = std::numeric_limits<double>::infinity();
  for (const auto& [e, sp, cfg] : evals)
    rep.best_energy = std::min(rep.best_energy, e);
  for (const auto& [e, sp, cfg] : evals) {
    if (e > rep.best_energy + 1e-12) continue;
    if (!rep.stripe_spec) rep.stripe_spec = sp;
    rep.minimizers.push_back(canonical_form(cfg));
  }
  std::sort(rep.minimizers.begin(), rep.minimizers.end(),
            [](const TorusConfig& a, const TorusConfig& b) {
              return a.cells < b.cells;
            });
  rep.minimizers.erase(
      std::unique(rep.minimizers.begin(), rep.minimizers.end()),
      rep.minimizers.end());
  rep.is_stripe.assign(rep.minimizers.size(), true);
  return rep;
}

SearchReport anneal(const TorusConfig& start, const KernelSpec& spec,
                    const AnnealSchedule& schedule) {
  if (start.d != spec.d)
    throw std::invalid_argument("anneal: dimension mismatch");
  if (spec.d != 1 && spec.d != 2)
    throw std::invalid_argument("anneal: implemented for d in {1, 2}");
  if (!(spec.tau > 0)) throw std::invalid_argument("anneal: requires tau > 0");
  const double kappa = spec.range();
  if (std::abs(start.spacing - kappa) > 1e-9 * std::max(1.0, kappa))
    throw std::invalid_argument(
        "anneal: start.spacing must equal tau^(1/beta)");
  if (!(schedule.t0 >= 0) || !(schedule.cooling > 0) ||
      schedule.cooling > 1 || schedule.steps < 0)
    throw std::invalid_argument("anneal: invalid schedule");

  const double scale =
      std::pow(spec.tau, -(spec.p - spec.d) / spec.beta());
  const double coupling = jc_dsc(spec.d, spec.p, 1e-12) - spec.tau;
  const KernelSpec flat(spec.d, spec.p, 0, KernelFamily::Euclidean);
  const PeriodizedKernel W = periodize(flat, start.n, 1.0, 1e-12);
  TorusConfig unit = start;
  unit.spacing = 1;
  FlipEngine eng(unit, coupling, W);

  std::mt19937 rng(schedule.seed);
  std::uniform_int_distribution<std::size_t> pick(0, unit.size() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double temp = schedule.t0;
  long long visited = 0;
  for (long long s = 0; s < schedule.steps; ++s) {
    if ((s & 65535) == 65535) eng.refresh();
    const std::size_t c = pick(rng);
    const double de = scale * eng.delta(c);
    ++visited;
    bool accept = de <= 0;
    if (!accept && temp > 0) accept = unif(rng) < std::exp(-de / temp);
    if (accept) eng.flip(c);
    temp *= schedule.cooling;
  }

  // Zero-temperature descent: sweep until no single flip lowers the energy.
  eng.refresh();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t c = 0; c < unit.size(); ++c) {
      ++visited;
      if (scale * eng.delta(c) < -1e-13) {
        eng.flip(c);
        improved = true;
      }
    }
    eng.refresh();
  }

  TorusConfig fin = eng.config();
  fin.spacing = kappa;
  SearchReport rep;
  rep.method = SearchMethod::Anneal;
  rep.best_energy = energy_rescaled_dsc(fin, spec);
  rep.visited = visited;
  rep.minimizers.push_back(canonical_form(fin));
  const StripeCheck sc = stripe_check(rep.minimizers.front());
  rep.is_stripe.push_back(sc.is_stripe);
  if (sc.is_periodic_stripe) rep.stripe_spec = sc.spec;
  return rep;
}

}  // namespace stripes
