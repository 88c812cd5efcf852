#include "lureobs/lure_system.hpp"

#include <cmath>
#include <stdexcept>

namespace lureobs {

StateFn zero_state_fn() {
  return [](const Vec& x, const Vec&) { return Vec::Zero(x.size()); };
}

MatrixFn zero_matrix_fn(int l) {
  return [l](const Vec& x, const Vec&) { return Mat::Zero(x.size(), l); };
}

ThetaFn zero_theta_fn(int l) {
  return [l](double, const Vec&, const Vec&) { return Vec::Zero(l); };
}

InputFn zero_input_fn(int r) {
  return [r](double) { return Vec::Zero(r); };
}

void LureSystem::validate() const {
  const auto& d = dims;
  if (d.n < 1 || d.m < 1 || d.p < 1 || d.r < 1 || d.l < 1)
    throw std::invalid_argument("LureSystem: all dimensions must be >= 1");
  auto expect = [](const Mat& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
      throw std::invalid_argument(std::string("LureSystem: bad shape for ") +
                                  name);
  };
  expect(A, d.n, d.n, "A");
  expect(B, d.n, d.m, "B");
  expect(C, d.m, d.n, "C");
  expect(F, d.p, d.n, "F");
  if (fop.dimension() != d.m)
    throw std::invalid_argument(
        "LureSystem: feedback map dimension must equal m");
  if (!f1 || !f2 || !theta || !input)
    throw std::invalid_argument(
        "LureSystem: f1, f2, theta and input must all be set");
}

Vec plant_rhs(const LureSystem& sys, double t, const Vec& x, const Vec& u) {
  const auto& d = sys.dims;
  if (x.size() != d.n)
    throw std::invalid_argument("plant_rhs: state dimension mismatch");
  if (u.size() != d.r)
    throw std::invalid_argument("plant_rhs: input dimension mismatch");

  const Vec w = -sys.fop.min_norm_selection(sys.C * x);
  // Summed stepwise so that identically-zero tail terms leave the bits of
  // the shared head untouched (observer synchrony relies on this).
  Vec rhs = sys.A * x;
  rhs += sys.B * w;
  Vec g1 = sys.f1(x, u);
  if (g1.size() != d.n)
    throw std::invalid_argument("plant_rhs: f1 returned wrong dimension");
  rhs += g1;
  Mat g2 = sys.f2(x, u);
  if (g2.rows() != d.n || g2.cols() != d.l)
    throw std::invalid_argument("plant_rhs: f2 returned wrong shape");
  Vec th = sys.theta(t, x, u);
  if (th.size() != d.l)
    throw std::invalid_argument("plant_rhs: theta returned wrong dimension");
  rhs += g2 * th;
  return rhs;
}

Vec DecomposedSystem::f11(const Vec& x, const Vec& u) const {
  return sys.f1(x, u).head(q);
}

Vec DecomposedSystem::f12(const Vec& x, const Vec& u) const {
  return sys.f1(x, u).tail(sys.dims.n - q);
}

Mat DecomposedSystem::f21(const Vec& x, const Vec& u) const {
  return sys.f2(x, u).topRows(q);
}

Mat DecomposedSystem::f22(const Vec& x, const Vec& u) const {
  return sys.f2(x, u).bottomRows(sys.dims.n - q);
}

Mat DecomposedSystem::reassembled_A() const {
  const int n = sys.dims.n;
  Mat a(n, n);
  a.topLeftCorner(q, q) = A11;
  a.topRightCorner(q, n - q) = A12;
  a.bottomLeftCorner(n - q, q) = A21;
  a.bottomRightCorner(n - q, n - q) = A22;
  return a;
}

Mat DecomposedSystem::reassembled_B() const {
  Mat b(sys.dims.n, sys.dims.m);
  b.topRows(q) = B1;
  b.bottomRows(sys.dims.n - q) = B2;
  return b;
}

Mat DecomposedSystem::reassembled_C() const {
  Mat c(sys.dims.m, sys.dims.n);
  c.leftCols(q) = C1;
  c.rightCols(sys.dims.n - q) = C2;
  return c;
}

Mat DecomposedSystem::reassembled_F() const {
  Mat f = Mat::Zero(sys.dims.p, sys.dims.n);
  f.leftCols(q) = Fq;
  return f;
}

DecomposedSystem decompose(const LureSystem& sys, int q) {
  sys.validate();
  const int n = sys.dims.n;
  if (q < 1 || q >= n)
    throw std::invalid_argument("decompose: q must satisfy 1 <= q < n");
  if (sys.dims.p != q)
    throw std::invalid_argument(
        "decompose: F must be q x n (output dimension p == q)");
  if (!sys.F.rightCols(n - q).isZero(0.0))
    throw std::invalid_argument(
        "decompose: F must have the form (Fq 0) with zero trailing block");
  Mat fq = sys.F.leftCols(q);
  Eigen::JacobiSVD<Mat> svd(fq);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(q - 1);
  if (!(smin > 1e-12 * smax))
    throw std::invalid_argument("decompose: Fq is singular within tolerance");

  DecomposedSystem dec;
  dec.sys = sys;
  dec.q = q;
  dec.A11 = sys.A.topLeftCorner(q, q);
  dec.A12 = sys.A.topRightCorner(q, n - q);
  dec.A21 = sys.A.bottomLeftCorner(n - q, q);
  dec.A22 = sys.A.bottomRightCorner(n - q, n - q);
  dec.B1 = sys.B.topRows(q);
  dec.B2 = sys.B.bottomRows(n - q);
  dec.C1 = sys.C.leftCols(q);
  dec.C2 = sys.C.rightCols(n - q);
  dec.Fq = fq;
  return dec;
}

LipschitzSpotCheck spot_check_lipschitz(const LureSystem& sys,
                                        const LipschitzBounds& bounds,
                                        double box_radius, int pairs,
                                        std::uint64_t seed) {
  if (pairs < 1)
    throw std::invalid_argument("spot_check_lipschitz: pairs must be >= 1");
  Rng rng(seed);
  LipschitzSpotCheck out;
  const auto& d = sys.dims;
  for (int i = 0; i < pairs; ++i) {
    Vec x = rng.uniform_vec(d.n, -box_radius, box_radius);
    Vec y = rng.uniform_vec(d.n, -box_radius, box_radius);
    Vec u = rng.uniform_vec(d.r, -box_radius, box_radius);
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    const double r1 = (sys.f1(x, u) - sys.f1(y, u)).norm() / dx;
    const double r2 = (sys.f2(x, u) - sys.f2(y, u)).norm() / dx;
    out.worst_ratio_f1 = std::max(out.worst_ratio_f1, r1);
    out.worst_ratio_f2 = std::max(out.worst_ratio_f2, r2);
    if (r1 > bounds.L1) ++out.violations_f1;
    if (r2 > bounds.L2) ++out.violations_f2;
    const double t = rng.uniform(0.0, 4.0 * M_PI);
    const double tn = sys.theta(t, x, u).norm();
    out.worst_theta_norm = std::max(out.worst_theta_norm, tn);
    if (tn > bounds.L3) ++out.violations_theta;
  }
  return out;
}

}  // namespace lureobs
