// Ground-state discovery on lattice tori: exhaustive enumeration with
// incremental single-flip energy updates, stripe-width scans under the
// rescaled near-critical energy, and Metropolis annealing.  All searches
// report canonical minimizers and structural stripe flags.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stripes/energy.hpp"
#include "stripes/kernels.hpp"
#include "stripes/lattice.hpp"

namespace stripes {

enum class SearchMethod { Exhaustive, Anneal, StripeScan };

struct SearchReport {
  double best_energy = 0;
  // Canonical forms of the distinct minimizer classes, sorted; every entry's
  // energy lies within 1e-12 of best_energy.
  std::vector<TorusConfig> minimizers;
  std::vector<bool> is_stripe;            // structural flag per minimizer
  std::optional<StripeSpec> stripe_spec;  // set when some minimizer is an
                                          // alternating equal-width stripe
  long long visited = 0;  // configurations examined / moves proposed
  SearchMethod method = SearchMethod::Exhaustive;
};

// Incremental single-flip evaluator of the unit-spacing torus energy
//   (J * Per - pair sum) / n^d
// in the same convention as energy_dsc.  delta() costs O(d), flip() updates
// the convolution field in O(n^d).  Long flip sequences accumulate roundoff
// drift in the cached sums; refresh() rebuilds them from the configuration.
class FlipEngine {
 public:
  // start must have unit spacing; W must be periodized on the same torus at
  // spacing 1 (the table is copied).
  FlipEngine(const TorusConfig& start, double J, const PeriodizedKernel& W);

  double energy() const;
  double delta(std::size_t cell) const;  // energy change if cell were flipped
  void flip(std::size_t cell);
  void refresh();
  const TorusConfig& config() const { return cfg_; }

 private:
  TorusConfig cfg_;
  PeriodizedKernel w_;
  double j_ = 0;
  double wsum_ = 0;
  std::vector<double> phi_;  // (W * chi)(x), diagonal image term included
  long long per_ = 0;        // ordered neighbor disagreement count
  long long cnt_ = 0;
  double tsum_ = 0;          // sum_x chi(x) phi(x)
};

// Exact global minimizers of the unit-spacing energy at coupling J over all
// 2^(n^d) configurations, deduplicated by canonical_form.  The index space
// is partitioned across hardware threads; visited always equals 2^(n^d).
// Budget: d = 1 needs n <= 20, d = 2 needs n <= 5 (throws beyond).
SearchReport enumerate_ground_states(int d, int n, double J, double p);

// Same search under the rescaled near-critical energy; reported minimizers
// carry spacing tau^(1/beta).  Requires spec.tau > 0.
SearchReport enumerate_ground_states(int n, const KernelSpec& spec);

// Evaluates the rescaled energy of every admissible stripe pattern on the
// n-torus at spacing tau^(1/beta) -- widths m*kappa whose period 2m divides
// n, all phases being translates -- and reports the argmin.  When n admits
// no stripe period the report is empty with best_energy = +infinity.
SearchReport stripe_scan(int n, const KernelSpec& spec);

struct AnnealSchedule {
  double t0 = 1;           // initial temperature
  double cooling = 0.999;  // geometric factor applied after every step
  long long steps = 0;     // Metropolis proposals
  std::uint32_t seed = 0;
};

// Metropolis single-flip annealing of the rescaled energy from the given
// start, followed by a zero-temperature descent to a single-flip local
// minimum.  Identical schedules and seeds give identical trajectories.
// Requires spec.tau > 0 and start.spacing == tau^(1/beta).
SearchReport anneal(const TorusConfig& start, const KernelSpec& spec,
                    const AnnealSchedule& schedule);

}  // namespace stripes
