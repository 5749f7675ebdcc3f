// Interaction kernels on R^d and their certified periodizations onto a
// discrete torus.  Two families: the smoothed 1-norm kernel
//   k(z) = (|z|_1 + tau^(1/beta))^(-p),   beta = p - d - 1,
// and the plain Euclidean power law |z|^(-p) used on lattices.
#pragma once

#include <span>
#include <vector>

#include "stripes/numerics.hpp"

namespace stripes {

enum class KernelFamily { OneNorm, Euclidean };

struct KernelSpec {
  int d = 1;
  double p = 3;
  double tau = 0;
  KernelFamily family = KernelFamily::OneNorm;

  KernelSpec(int d_, double p_, double tau_, KernelFamily fam);

  double beta() const { return p - d - 1; }
  // Exponent of the one-dimensional reduction of the kernel.
  double q() const { return p - d + 1; }
  // Mollification length tau^(1/beta) (0 when tau = 0).
  double range() const;
  // Prefactor of the one-dimensional reduction: prod_{j=1..d-1} 2/(p-j).
  double cq() const;
};

// Kernel value at a point of R^d.  For tau = 0 and zeta = 0 returns +inf.
double k_tau(const KernelSpec& spec, std::span<const double> zeta);

// Euclidean power kernel |zeta|^(-p); throws std::invalid_argument at 0.
double k_dsc(double p, std::span<const double> zeta);

// One-dimensional reduction cq * (range + |z|)^(-q); +inf at z=0 when tau=0.
double k_hat_tau(const KernelSpec& spec, double z);

// Density f(alpha) with int_0^inf f(alpha) exp(-alpha s) dalpha = k_hat_tau(s):
// f(alpha) = cq * alpha^(q-1) * exp(-alpha*range) / Gamma(q).
double inverse_laplace_density(const KernelSpec& spec, double alpha);

// Kernel summed over all torus images, tabulated on the offset grid
// kappa*Z^d intersected with [0, side)^d.  The entry at offset 0 holds the
// sum over the non-zero periodic images of the origin (the k = 0 singular
// term is excluded there and only there).
struct PeriodizedKernel {
  int d = 1;
  int n = 0;          // grid points per axis, side = n * spacing
  double side = 0;
  double spacing = 1;
  std::vector<double> table;  // n^d entries, row-major
  double tail_error = 0;      // certified bound on the truncated image sum

  // Value at an integer offset vector (componentwise reduced mod n).
  double at(std::span<const int> offset) const;
  double sum() const;  // sum of all table entries
};

// Builds the image-sum table with a certified tail bound <= tol; throws
// tolerance_error if the requested tolerance cannot be certified.
PeriodizedKernel periodize(const KernelSpec& spec, double side, double kappa,
                           double tol);

}  // namespace stripes
