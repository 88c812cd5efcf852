#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lureobs/observer_design.hpp"

namespace lureobs {

enum class Scheme { Euler, Rk4 };

/// How the observer realizes Sign(e_y) (and how plant-only runs realize a
/// Sign-type feedback): the exact minimal-norm selection, a sigmoid
/// surrogate, or the time-guided approximation.
struct SignMode {
  enum class Kind { Exact, Sigmoid, Guided };

  Kind kind = Kind::Exact;
  double eps = 1e-3;                            // sigmoid
  SigmoidVariant variant = SigmoidVariant::Abs; // sigmoid
  GuidedSignParams params;                      // guided

  static SignMode exact();
  static SignMode sigmoid(double eps, SigmoidVariant variant);
  static SignMode guided(GuidedSignParams params);

  /// Realized value at time t for argument v; tol_zero is the exact-mode
  /// dead zone (|v| <= tol_zero maps to 0).
  Vec realize(double t, const Vec& v, double tol_zero) const;

  std::string label() const;
};

enum class Selection { MinNorm };

struct SimConfig {
  double t0 = 0;
  double t_end = 10;
  double h_step = 1e-3;
  Scheme scheme = Scheme::Euler;
  SignMode sign_mode;
  Selection selection = Selection::MinNorm;
  double tol_zero = 0;          // dead zone for exact-mode sign realizations
  bool allow_unverified = false;  // downgrade gain preconditions to warnings
};

enum class RunKind { PlantOnly, FullObserver, BoundedObserver, Reduced };

/// Fixed-grid trajectory. For observer runs x_hat holds the observer state
/// (z_hat for reduced runs, whose error metrics refer to e_z = z_hat - z);
/// V is the quadratic Lyapunov value and W the output-error functional
/// (zero for plant-only and reduced runs). On blow-up (non-finite state or
/// norm > 1e9) the series are truncated at the last valid grid point and
/// `aborted` is set.
struct Trajectory {
  RunKind kind = RunKind::PlantOnly;
  std::vector<double> times;
  std::vector<Vec> x;
  std::vector<Vec> x_hat;
  std::vector<double> e_norm, ey_norm, V, W;
  std::vector<Vec> omega, omega_hat;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
};

/// Plant-only integration. Sign modes other than Exact require a Sign-type
/// feedback map and replace its selection by the chosen approximation.
Trajectory simulate_plant(const LureSystem& sys, const SimConfig& cfg,
                          const Vec& x0);

/// Full-order observer with disturbance-scaled switching correction
///   dxh = A xh + B wh - L e_y + f1(xh,u) - beta |h(xh,u)| P^-1 F^T Sign(e_y),
///   wh in -Fop(C xh - K e_y),  e_y = F xh - y.
/// Precondition beta >= L3 (refusal unless cfg.allow_unverified).
Trajectory simulate_full(const LureSystem& sys, const ObserverGains& gains,
                         const LipschitzBounds& bounds, const SimConfig& cfg,
                         const Vec& x0, const Vec& xhat0);

/// Bounded-h variant: the switching correction -beta P^-1 F^T Sign(e_y) is
/// not scaled by |h|. Precondition beta > L3 * L4 (L4 required; refusal
/// unless cfg.allow_unverified).
Trajectory simulate_bounded_h(const LureSystem& sys,
                              const ObserverGains& gains,
                              const LipschitzBounds& bounds,
                              const SimConfig& cfg, const Vec& x0,
                              const Vec& xhat0);

/// Reduced-order observer on z = x2 + K x1, driven by the measured part
/// only (x1 is recovered from y = Fq x1). Requires a passing
/// check_reduced_design report (refusal unless cfg.allow_unverified).
Trajectory simulate_reduced(const DecomposedSystem& dec,
                            const ReducedGains& rg,
                            const LipschitzBounds& bounds,
                            const VerdictReport& report, const SimConfig& cfg,
                            const Vec& x0, const Vec& zhat0);

/// Scalar series extracted from a trajectory for metrics.
struct SeriesSelector {
  enum class Kind {
    State,          // x[index]
    ObserverState,  // x_hat[index]
    Error,          // x_hat[index] - x[index] (full-order runs)
    Omega,          // omega[index]
    OmegaHat,       // omega_hat[index]
    ENorm,
    EyNorm,
    V,
    W,
  };
  Kind kind = Kind::ENorm;
  int index = 0;
};

std::vector<double> extract_series(const Trajectory& traj,
                                   const SeriesSelector& sel);

/// Sign-switch statistics over the trailing window of length
/// window_fraction * (t_end - t0): switches counted between consecutive
/// samples of nonzero opposite sign, plus the mean absolute value.
struct ChatteringIndex {
  long switch_count = 0;
  double switches_per_unit_time = 0;
  double mean_amplitude = 0;
  double window_duration = 0;
};

ChatteringIndex chattering_index(const Trajectory& traj,
                                 const SeriesSelector& sel,
                                 double window_fraction);

/// First grid time after which |series| stays <= tol through the end of the
/// horizon; nullopt when the final sample still exceeds tol.
std::optional<double> convergence_time(const Trajectory& traj,
                                       const SeriesSelector& sel, double tol);

/// First grid time with |series| <= tol; nullopt when never reached.
std::optional<double> first_crossing_time(const Trajectory& traj,
                                          const SeriesSelector& sel,
                                          double tol);

/// CSV export, one row per grid point, floats at 17 significant digits.
/// Full-order header: t,x_1..x_n,xhat_1..xhat_n,e_norm,ey_norm,V,W,omega,
/// omega_hat (feedback columns indexed when m > 1). Plant-only runs emit
/// t,x_*,omega; reduced runs name the observer columns zhat_*.
void write_csv(const Trajectory& traj, const std::string& path);

}  // namespace lureobs
