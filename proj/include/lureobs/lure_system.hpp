#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lureobs/linalg.hpp"
#include "lureobs/set_valued.hpp"

namespace lureobs {

/// Dimensions of a Lur'e system: state n, feedback channel m, output p,
/// input r, disturbance l.
struct SystemDims {
  int n = 0, m = 0, p = 0, r = 0, l = 0;
};

using StateFn = std::function<Vec(const Vec& x, const Vec& u)>;    // R^n
using MatrixFn = std::function<Mat(const Vec& x, const Vec& u)>;   // n x l
using ThetaFn = std::function<Vec(double t, const Vec& x, const Vec& u)>;
using InputFn = std::function<Vec(double t)>;                      // R^r

StateFn zero_state_fn();
MatrixFn zero_matrix_fn(int l);
ThetaFn zero_theta_fn(int l);
InputFn zero_input_fn(int r);

/// Set-valued Lur'e system
///
///   dx/dt = A x + B w + f1(x,u) + f2(x,u) theta(t,x,u),   w in -Fop(C x)
///   y     = F x
///
/// theta is an unknown disturbance: simulations evaluate it for the plant,
/// observers never read it (nor x). `input` generates u(t) for simulation
/// runs; plant_rhs takes u explicitly.
struct LureSystem {
  Mat A;  // n x n
  Mat B;  // n x m
  Mat C;  // m x n
  Mat F;  // p x n
  StateFn f1;
  MatrixFn f2;
  ThetaFn theta;
  InputFn input;
  SetValuedMap fop = SetValuedMap::sign_map(1);
  SystemDims dims;

  /// Throws std::invalid_argument on any dimension inconsistency.
  void validate() const;
};

/// Declared Lipschitz/bound constants: L1 for f1, L2 for f2 (both in x),
/// L3 a bound on |theta|, L4 an optional bound on |h|. These are trusted
/// inputs; see spot_check_lipschitz for a sampled sanity probe.
struct LipschitzBounds {
  double L1 = 0, L2 = 0, L3 = 0;
  std::optional<double> L4;

  double gamma() const { return L1 + L2 * L3; }
};

/// Plant vector field at (t, x) with input u, using the minimal-norm
/// selection of -Fop(Cx).
Vec plant_rhs(const LureSystem& sys, double t, const Vec& x, const Vec& u);

/// Block decomposition for measured-part coordinates x = (x1, x2),
/// x1 in R^q. Requires F = (Fq 0) with Fq q x q invertible (so p == q).
struct DecomposedSystem {
  LureSystem sys;
  int q = 0;
  Mat A11, A12, A21, A22;
  Mat B1, B2;
  Mat C1, C2;
  Mat Fq;

  Vec f11(const Vec& x, const Vec& u) const;  // first q rows of f1
  Vec f12(const Vec& x, const Vec& u) const;  // last n-q rows of f1
  Mat f21(const Vec& x, const Vec& u) const;
  Mat f22(const Vec& x, const Vec& u) const;

  Mat reassembled_A() const;
  Mat reassembled_B() const;
  Mat reassembled_C() const;
  Mat reassembled_F() const;
};

/// Splits sys along q. Throws std::invalid_argument when F is not of the
/// form (Fq 0), when p != q, or when Fq is singular beyond 1e-12 * |Fq|.
DecomposedSystem decompose(const LureSystem& sys, int q);

/// Sampled probe of the declared constants over random pairs in
/// [-box_radius, box_radius]^n (u, t sampled likewise). Violations are
/// reported, never thrown: constants stay trusted inputs.
struct LipschitzSpotCheck {
  int violations_f1 = 0, violations_f2 = 0, violations_theta = 0;
  double worst_ratio_f1 = 0, worst_ratio_f2 = 0, worst_theta_norm = 0;
};

LipschitzSpotCheck spot_check_lipschitz(const LureSystem& sys,
                                        const LipschitzBounds& bounds,
                                        double box_radius, int pairs,
                                        std::uint64_t seed);

}  // namespace lureobs
