#pragma once

#include <cstdint>
#include <functional>

#include "lureobs/linalg.hpp"

namespace lureobs {

/// A closed convex value of a set-valued map at one point: a singleton, a
/// closed interval (scalar maps only), or a ball centered at the origin.
struct SetValue {
  enum class Kind { Singleton, Interval, Ball };

  Kind kind = Kind::Singleton;
  Vec point;               // Singleton payload
  double lo = 0, hi = 0;   // Interval payload (dim == 1)
  double radius = 0;       // Ball payload, centered at 0
  int dim = 0;

  static SetValue singleton(Vec v);
  static SetValue interval(double lo, double hi);
  static SetValue ball(int dim, double radius);

  bool is_singleton() const { return kind == Kind::Singleton; }

  /// The unique element of minimal Euclidean norm.
  Vec min_norm_element() const;

  /// Membership test with slack, used by tests.
  bool contains(const Vec& v, double tol = 0.0) const;
};

/// Descriptor of a maximal monotone set-valued operator on R^m with a single
/// branch point at the origin.
///
/// Built-in kinds:
///   Sign   -- x/|x| for x != 0, the closed unit ball at 0
///   Relay  -- sign(x)(a|x| + b) for x != 0, [-b, b] at 0 (scalar, a,b >= 0)
///   Custom -- user branch function for x != 0, user-declared value at 0
///
/// The branch point is detected by |x| <= dead_zone; the default dead zone is
/// 0, i.e. an exact-zero comparison.
class SetValuedMap {
 public:
  enum class Kind { Sign, Relay, Custom };

  static SetValuedMap sign_map(int dim);
  static SetValuedMap relay(double slope, double offset);
  static SetValuedMap custom(int dim, std::function<Vec(const Vec&)> branch,
                             SetValue at_zero);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double dead_zone() const { return dead_zone_; }
  void set_dead_zone(double tol);

  double relay_slope() const { return slope_; }
  double relay_offset() const { return offset_; }

  /// Full set value at x.
  SetValue eval(const Vec& x) const;

  /// Minimal-norm selection: eval(x).min_norm_element().
  Vec min_norm_selection(const Vec& x) const;

 private:
  SetValuedMap() = default;

  Kind kind_ = Kind::Sign;
  int dim_ = 1;
  double slope_ = 0, offset_ = 0;  // relay parameters
  std::function<Vec(const Vec&)> branch_;
  SetValue at_zero_;
  double dead_zone_ = 0.0;
};

/// x/|x| for x != 0, 0 at the origin (the minimal-norm selection of Sign).
Vec sign_exact(const Vec& x);

enum class SigmoidVariant { Abs, Sqrt };

/// Smooth sign surrogate: x/(|x| + eps) or x/sqrt(|x|^2 + eps), eps > 0.
Vec sign_sigmoid(const Vec& x, double eps, SigmoidVariant variant);

/// Parameters of the time-guided sign approximation. The guide is
/// delta(t) = exp(-k1 t - k2) unless a custom positive decreasing guide is
/// supplied, in which case k1/k2 are ignored.
struct GuidedSignParams {
  double k1 = 0.5;  // decay rate, > 0
  double k2 = 0.0;  // offset, >= 0 (delta(0) = exp(-k2))
  double M = 1.0;   // shaping gain, > 0
  double N = 3.0;   // shaping power, > 0
  std::function<double(double)> guide;  // optional delta(t) override

  double delta(double t) const;
  void validate() const;
};

/// Guided sign: outside the |x| > delta(t) ball it equals sign_exact(x);
/// inside, the magnitude is scaled by 1 - (1 - |x|/delta)/(1 + M|x|)^N, which
/// is continuous across the ball boundary and vanishes at x = 0.
Vec sign_delta(double t, const Vec& x, const GuidedSignParams& p);

/// Sampled monotonicity probe: the minimum of <F(x)-F(y), x-y> over random
/// pairs drawn uniformly from [-box_radius, box_radius]^m, using minimal-norm
/// selections. Nonnegative (up to roundoff) for monotone maps.
double monotonicity_min(const SetValuedMap& map, int pairs, double box_radius,
                        std::uint64_t seed);

/// Sampled check that a custom guide decreases on [t0, t1].
bool guide_is_decreasing(const GuidedSignParams& p, double t0, double t1,
                         int samples);

}  // namespace lureobs
