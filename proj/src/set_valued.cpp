#include "lureobs/set_valued.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lureobs {

SetValue SetValue::singleton(Vec v) {
  SetValue s;
  s.kind = Kind::Singleton;
  s.dim = static_cast<int>(v.size());
  s.point = std::move(v);
  return s;
}

SetValue SetValue::interval(double lo, double hi) {
  if (!(lo <= hi))
    throw std::invalid_argument("SetValue::interval: requires lo <= hi");
  SetValue s;
  s.kind = Kind::Interval;
  s.dim = 1;
  s.lo = lo;
  s.hi = hi;
  return s;
}

SetValue SetValue::ball(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("SetValue::ball: dim must be >= 1");
  if (radius < 0)
    throw std::invalid_argument("SetValue::ball: radius must be >= 0");
  SetValue s;
  s.kind = Kind::Ball;
  s.dim = dim;
  s.radius = radius;
  return s;
}

Vec SetValue::min_norm_element() const {
  switch (kind) {
    case Kind::Singleton:
      return point;
    case Kind::Interval: {
      Vec v(1);
      v[0] = lo > 0 ? lo : (hi < 0 ? hi : 0.0);
      return v;
    }
    case Kind::Ball:
      return Vec::Zero(dim);
  }
  return Vec::Zero(dim);  // unreachable
}

bool SetValue::contains(const Vec& v, double tol) const {
  if (v.size() != dim) return false;
  switch (kind) {
    case Kind::Singleton:
      return (v - point).norm() <= tol;
    case Kind::Interval:
      return v[0] >= lo - tol && v[0] <= hi + tol;
    case Kind::Ball:
      return v.norm() <= radius + tol;
  }
  return false;
}

SetValuedMap SetValuedMap::sign_map(int dim) {
  if (dim < 1)
    throw std::invalid_argument("SetValuedMap::sign_map: dim must be >= 1");
  SetValuedMap m;
  m.kind_ = Kind::Sign;
  m.dim_ = dim;
  return m;
}

SetValuedMap SetValuedMap::relay(double slope, double offset) {
  if (slope < 0 || offset < 0)
    throw std::invalid_argument(
        "SetValuedMap::relay: slope and offset must be >= 0 for monotonicity");
  SetValuedMap m;
  m.kind_ = Kind::Relay;
  m.dim_ = 1;
  m.slope_ = slope;
  m.offset_ = offset;
  return m;
}

SetValuedMap SetValuedMap::custom(int dim,
                                  std::function<Vec(const Vec&)> branch,
                                  SetValue at_zero) {
  if (dim < 1)
    throw std::invalid_argument("SetValuedMap::custom: dim must be >= 1");
  if (!branch)
    throw std::invalid_argument("SetValuedMap::custom: branch is required");
  if (at_zero.dim != dim)
    throw std::invalid_argument(
        "SetValuedMap::custom: at_zero dimension mismatch");
  SetValuedMap m;
  m.kind_ = Kind::Custom;
  m.dim_ = dim;
  m.branch_ = std::move(branch);
  m.at_zero_ = std::move(at_zero);
  return m;
}

void SetValuedMap::set_dead_zone(double tol) {
  if (tol < 0)
    throw std::invalid_argument("SetValuedMap::set_dead_zone: tol must be >= 0");
  dead_zone_ = tol;
}

SetValue SetValuedMap::eval(const Vec& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("SetValuedMap::eval: dimension mismatch");
  const double nx = x.norm();
  const bool at_branch = nx <= dead_zone_;  // dead_zone 0 -> exact zero test
  switch (kind_) {
    case Kind::Sign:
      return at_branch ? SetValue::ball(dim_, 1.0) : SetValue::singleton(x / nx);
    case Kind::Relay: {
      if (at_branch) return SetValue::interval(-offset_, offset_);
      Vec v(1);
      v[0] = (x[0] > 0 ? 1.0 : -1.0) * (slope_ * std::abs(x[0]) + offset_);
      return SetValue::singleton(v);
    }
    case Kind::Custom: {
      if (at_branch) return at_zero_;
      Vec v = branch_(x);
      if (v.size() != dim_)
        throw std::invalid_argument(
            "SetValuedMap::eval: custom branch returned wrong dimension");
      return SetValue::singleton(std::move(v));
    }
  }
  return SetValue::ball(dim_, 0.0);  // unreachable
}

Vec SetValuedMap::min_norm_selection(const Vec& x) const {
  return eval(x).min_norm_element();
}

Vec sign_exact(const Vec& x) {
  const double n = x.norm();
  if (n == 0.0) return Vec::Zero(x.size());
  return x / n;
}

Vec sign_sigmoid(const Vec& x, double eps, SigmoidVariant variant) {
  if (!(eps > 0))
    throw std::invalid_argument("sign_sigmoid: eps must be > 0");
  switch (variant) {
    case SigmoidVariant::Abs:
      return x / (x.norm() + eps);
    case SigmoidVariant::Sqrt:
      return x / std::sqrt(x.squaredNorm() + eps);
  }
  return x;  // unreachable
}

double GuidedSignParams::delta(double t) const {
  if (guide) return guide(t);
  return std::exp(-k1 * t - k2);
}

void GuidedSignParams::validate() const {
  if (!(M > 0) || !(N > 0))
    throw std::invalid_argument("GuidedSignParams: M and N must be > 0");
  if (guide) return;  // custom guides carry their own shape
  if (!(k1 > 0))
    throw std::invalid_argument("GuidedSignParams: k1 must be > 0");
  if (!(k2 >= 0))
    throw std::invalid_argument("GuidedSignParams: k2 must be >= 0");
}

Vec sign_delta(double t, const Vec& x, const GuidedSignParams& p) {
  if (!(t >= 0)) throw std::invalid_argument("sign_delta: t must be >= 0");
  p.validate();
  const double d = p.delta(t);
  if (!(d > 0) || !std::isfinite(d))
    throw std::invalid_argument("sign_delta: guide must be positive");
  const double n = x.norm();
  if (n == 0.0) return Vec::Zero(x.size());
  if (n > d) return x / n;
  const double factor = 1.0 - (1.0 - n / d) / std::pow(1.0 + p.M * n, p.N);
  return (factor / n) * x;
}

double monotonicity_min(const SetValuedMap& map, int pairs, double box_radius,
                        std::uint64_t seed) {
  if (pairs < 1)
    throw std::invalid_argument("monotonicity_min: pairs must be >= 1");
  Rng rng(seed);
  const int m = map.dimension();
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pairs; ++i) {
    Vec x = rng.uniform_vec(m, -box_radius, box_radius);
    Vec y = rng.uniform_vec(m, -box_radius, box_radius);
    Vec fx = map.min_norm_selection(x);
    Vec fy = map.min_norm_selection(y);
    worst = std::min(worst, (fx - fy).dot(x - y));
  }
  return worst;
}

bool guide_is_decreasing(const GuidedSignParams& p, double t0, double t1,
                         int samples) {
  if (samples < 2 || !(t1 > t0))
    throw std::invalid_argument("guide_is_decreasing: bad sampling window");
  double prev = p.delta(t0);
  for (int i = 1; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    const double cur = p.delta(t);
    if (cur > prev) return false;
    prev = cur;
  }
  return true;
}

}  // namespace lureobs
