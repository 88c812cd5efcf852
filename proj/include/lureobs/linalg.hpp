#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace lureobs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Deterministic uniform sampler. Wraps a fixed-width engine and derives
/// doubles by bit manipulation, so identical seeds give identical draws on
/// every platform/stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform draw in [0, 1).
  double next01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next01(); }

  Vec uniform_vec(Eigen::Index n, double lo, double hi) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

/// Largest singular value (operator 2-norm).
double spectral_norm(const Mat& m);

/// Extreme eigenvalues of a symmetric matrix. The argument is symmetrized
/// as (m + m^T)/2 before solving, so tiny asymmetries from accumulation
/// do not leak into complex arithmetic.
double sym_eig_max(const Mat& m);
double sym_eig_min(const Mat& m);

bool all_finite(const Vec& v);

}  // namespace lureobs
