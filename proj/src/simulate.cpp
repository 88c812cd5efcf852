#include "lureobs/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace lureobs {

SignMode SignMode::exact() { return SignMode{}; }

SignMode SignMode::sigmoid(double eps, SigmoidVariant variant) {
  if (!(eps > 0))
    throw std::invalid_argument("SignMode::sigmoid: eps must be > 0");
  SignMode m;
  m.kind = Kind::Sigmoid;
  m.eps = eps;
  m.variant = variant;
  return m;
}

SignMode SignMode::guided(GuidedSignParams params) {
  params.validate();
  SignMode m;
  m.kind = Kind::Guided;
  m.params = std::move(params);
  return m;
}

Vec SignMode::realize(double t, const Vec& v, double tol_zero) const {
  switch (kind) {
    case Kind::Exact: {
      const double n = v.norm();
      if (n <= tol_zero) return Vec::Zero(v.size());
      return v / n;
    }
    case Kind::Sigmoid:
      return sign_sigmoid(v, eps, variant);
    case Kind::Guided:
      return sign_delta(t, v, params);
  }
  return v;  // unreachable
}

std::string SignMode::label() const {
  char buf[96];
  switch (kind) {
    case Kind::Exact:
      return "exact";
    case Kind::Sigmoid:
      std::snprintf(buf, sizeof buf, "sigmoid:%g:%s", eps,
                    variant == SigmoidVariant::Abs ? "abs" : "sqrt");
      return buf;
    case Kind::Guided:
      std::snprintf(buf, sizeof buf, "guided:%g:%g:%g:%g", params.k1,
                    params.k2, params.M, params.N);
      return buf;
  }
  return "?";
}

namespace {

constexpr double kBlowUpNorm = 1e9;

using RhsFn = std::function<Vec(double, const Vec&)>;
using RecordFn = std::function<void(Trajectory&, double, const Vec&)>;

Vec step_once(Scheme scheme, const RhsFn& f, double t, const Vec& s,
              double h) {
  if (scheme == Scheme::Euler) return s + h * f(t, s);
  Vec k1 = f(t, s);
  Vec k2 = f(t + 0.5 * h, s + (0.5 * h) * k1);
  Vec k3 = f(t + 0.5 * h, s + (0.5 * h) * k2);
  Vec k4 = f(t + h, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_grid(const SimConfig& cfg) {
  if (!(cfg.h_step > 0))
    throw std::invalid_argument("SimConfig: h_step must be > 0");
  if (!(cfg.t_end > cfg.t0))
    throw std::invalid_argument("SimConfig: t_end must exceed t0");
}

Trajectory run_grid(RunKind kind, const SimConfig& cfg, Vec state,
                    const RhsFn& rhs, const RecordFn& record) {
  Trajectory tr;
  tr.kind = kind;
  const long steps = std::lround((cfg.t_end - cfg.t0) / cfg.h_step);
  const long total = std::max(steps, 1L);
  tr.times.reserve(total + 1);
  for (long k = 0; k <= total; ++k) {
    const double t = cfg.t0 + k * cfg.h_step;
    if (!all_finite(state) || state.norm() > kBlowUpNorm) {
      tr.aborted = true;
      tr.abort_reason = "state norm exceeded blow-up guard at t = " +
                        std::to_string(t);
      break;
    }
    record(tr, t, state);
    if (k < total) state = step_once(cfg.scheme, rhs, t, state, cfg.h_step);
  }
  return tr;
}

void handle_precondition(const SimConfig& cfg, Trajectory* warnings_sink,
                         std::string msg, std::vector<std::string>& pending) {
  if (!cfg.allow_unverified) throw std::domain_error(msg);
  if (warnings_sink)
    warnings_sink->warnings.push_back(std::move(msg));
  else
    pending.push_back(std::move(msg));
}

// Shared core of the two full-order observers; scale_by_h picks the
// disturbance-scaled correction.
Trajectory run_full_observer(const LureSystem& sys, const ObserverGains& gains,
                             const LipschitzBounds& bounds,
                             const SimConfig& cfg, const Vec& x0,
                             const Vec& xhat0, bool scale_by_h) {
  sys.validate();
  gains.validate();
  check_grid(cfg);
  const auto& d = sys.dims;
  if (x0.size() != d.n || xhat0.size() != d.n)
    throw std::invalid_argument("simulate: initial state dimension mismatch");
  if (gains.P.rows() != d.n || gains.L.cols() != d.p || gains.K.rows() != d.m)
    throw std::invalid_argument("simulate: gain shapes disagree with system");

  std::vector<std::string> pending_warnings;
  if (scale_by_h) {
    if (!(gains.beta >= bounds.L3))
      handle_precondition(
          cfg, nullptr,
          "observer precondition failed: beta >= L3 is required",
          pending_warnings);
  } else {
    if (!bounds.L4.has_value())
      throw std::domain_error(
          "bounded-h observer requires the L4 bound on |h|");
    if (!(gains.beta > bounds.L3 * *bounds.L4))
      handle_precondition(
          cfg, nullptr,
          "observer precondition failed: beta > L3*L4 is required",
          pending_warnings);
  }

  const Mat PinvFt = gains.P.llt().solve(sys.F.transpose());  // n x p
  const Mat S = sys.F * PinvFt;                               // F P^-1 F^T
  const Mat Sinv = S.llt().solve(Mat::Identity(d.p, d.p));
  const Mat G = S.llt().solve(sys.F);  // for h(x,u) = (G f2)^T

  auto observer_rhs = [&](double t, const Vec& x, const Vec& xh,
                          const Vec& u) -> Vec {
    Vec ey = sys.F * xh - sys.F * x;  // e_y = F xh - y
    Vec wh = -sys.fop.min_norm_selection(sys.C * xh - gains.K * ey);
    Vec rhs = sys.A * xh;
    rhs += sys.B * wh;
    rhs += sys.f1(xh, u);
    rhs -= gains.L * ey;
    Vec sgn = cfg.sign_mode.realize(t, ey, cfg.tol_zero);
    double factor = gains.beta;
    if (scale_by_h) factor *= spectral_norm((G * sys.f2(xh, u)).transpose());
    rhs -= factor * (PinvFt * sgn);
    return rhs;
  };

  RhsFn rhs = [&](double t, const Vec& s) -> Vec {
    Vec x = s.head(d.n);
    Vec xh = s.tail(d.n);
    Vec u = sys.input(t);
    Vec out(2 * d.n);
    out.head(d.n) = plant_rhs(sys, t, x, u);
    out.tail(d.n) = observer_rhs(t, x, xh, u);
    return out;
  };

  RecordFn record = [&](Trajectory& tr, double t, const Vec& s) {
    Vec x = s.head(d.n);
    Vec xh = s.tail(d.n);
    Vec e = xh - x;
    Vec ey = sys.F * xh - sys.F * x;
    tr.times.push_back(t);
    tr.x.push_back(x);
    tr.x_hat.push_back(xh);
    tr.e_norm.push_back(e.norm());
    tr.ey_norm.push_back(ey.norm());
    tr.V.push_back(e.dot(gains.P * e));
    tr.W.push_back(0.5 * ey.dot(Sinv * ey));
    tr.omega.push_back(-sys.fop.min_norm_selection(sys.C * x));
    tr.omega_hat.push_back(
        -sys.fop.min_norm_selection(sys.C * xh - gains.K * ey));
  };

  Vec s0(2 * d.n);
  s0.head(d.n) = x0;
  s0.tail(d.n) = xhat0;
  Trajectory tr =
      run_grid(scale_by_h ? RunKind::FullObserver : RunKind::BoundedObserver,
               cfg, s0, rhs, record);
  tr.warnings.insert(tr.warnings.end(), pending_warnings.begin(),
                     pending_warnings.end());
  return tr;
}

}  // namespace

Trajectory simulate_plant(const LureSystem& sys, const SimConfig& cfg,
                          const Vec& x0) {
  sys.validate();
  check_grid(cfg);
  const auto& d = sys.dims;
  if (x0.size() != d.n)
    throw std::invalid_argument("simulate_plant: x0 dimension mismatch");
  const bool approx = cfg.sign_mode.kind != SignMode::Kind::Exact;
  if (approx && sys.fop.kind() != SetValuedMap::Kind::Sign)
    throw std::invalid_argument(
        "simulate_plant: sign approximations apply only to Sign-type feedback");

  auto applied_w = [&](double t, const Vec& x) -> Vec {
    if (approx) return -cfg.sign_mode.realize(t, sys.C * x, cfg.tol_zero);
    return -sys.fop.min_norm_selection(sys.C * x);
  };

  RhsFn rhs = [&](double t, const Vec& x) -> Vec {
    Vec u = sys.input(t);
    if (!approx) return plant_rhs(sys, t, x, u);
    Vec w = applied_w(t, x);
    Vec out = sys.A * x;
    out += sys.B * w;
    out += sys.f1(x, u);
    out += sys.f2(x, u) * sys.theta(t, x, u);
    return out;
  };

  RecordFn record = [&](Trajectory& tr, double t, const Vec& x) {
    tr.times.push_back(t);
    tr.x.push_back(x);
    tr.omega.push_back(applied_w(t, x));
  };

  return run_grid(RunKind::PlantOnly, cfg, x0, rhs, record);
}

Trajectory simulate_full(const LureSystem& sys, const ObserverGains& gains,
                         const LipschitzBounds& bounds, const SimConfig& cfg,
                         const Vec& x0, const Vec& xhat0) {
  return run_full_observer(sys, gains, bounds, cfg, x0, xhat0, true);
}

Trajectory simulate_bounded_h(const LureSystem& sys,
                              const ObserverGains& gains,
                              const LipschitzBounds& bounds,
                              const SimConfig& cfg, const Vec& x0,
                              const Vec& xhat0) {
  return run_full_observer(sys, gains, bounds, cfg, x0, xhat0, false);
}

Trajectory simulate_reduced(const DecomposedSystem& dec,
                            const ReducedGains& rg,
                            const LipschitzBounds& bounds,
                            const VerdictReport& report, const SimConfig& cfg,
                            const Vec& x0, const Vec& zhat0) {
  (void)bounds;
  rg.validate();
  check_grid(cfg);
  const auto& d = dec.sys.dims;
  const int nq = d.n - dec.q;
  if (x0.size() != d.n || zhat0.size() != nq)
    throw std::invalid_argument(
        "simulate_reduced: initial state dimension mismatch");
  if (rg.Q.rows() != nq)
    throw std::invalid_argument("simulate_reduced: Q size mismatch");

  std::vector<std::string> pending_warnings;
  if (!report.all_pass()) {
    if (!cfg.allow_unverified)
      throw std::domain_error(
          "simulate_reduced: reduced-order design conditions did not pass");
    pending_warnings.push_back(
        "running with failed reduced-order design conditions");
  }

  const Mat K = rg.K();
  const Mat Ared = dec.A22 + K * dec.A12;
  const Mat Bred = dec.B2 + K * dec.B1;
  const Mat Gx1 = (dec.A21 + K * dec.A11) - Ared * K;
  const Mat Cx1 = dec.C1 - dec.C2 * K;
  const auto Fq_lu = dec.Fq.fullPivLu();

  // The observer reads x1 only through the measurement y = Fq x1.
  auto measured_x1 = [&](const Vec& x) -> Vec {
    Vec y = dec.Fq * x.head(dec.q);
    return Fq_lu.solve(y);
  };

  RhsFn rhs = [&](double t, const Vec& s) -> Vec {
    Vec x = s.head(d.n);
    Vec zh = s.tail(nq);
    Vec u = dec.sys.input(t);
    Vec x1 = measured_x1(x);
    Vec wh = -dec.sys.fop.min_norm_selection(dec.C2 * zh + Cx1 * x1);
    Vec xr(d.n);  // reconstructed state fed to f1
    xr.head(dec.q) = x1;
    xr.tail(nq) = zh - K * x1;
    Vec f1v = dec.sys.f1(xr, u);
    Vec zdot = Ared * zh;
    zdot += Bred * wh;
    zdot += Gx1 * x1;
    zdot += K * f1v.head(dec.q) + f1v.tail(nq);  // (K I) f1
    Vec out(d.n + nq);
    out.head(d.n) = plant_rhs(dec.sys, t, x, u);
    out.tail(nq) = zdot;
    return out;
  };

  RecordFn record = [&](Trajectory& tr, double t, const Vec& s) {
    Vec x = s.head(d.n);
    Vec zh = s.tail(nq);
    Vec z = x.tail(nq) + K * x.head(dec.q);
    Vec ez = zh - z;
    tr.times.push_back(t);
    tr.x.push_back(x);
    tr.x_hat.push_back(zh);
    tr.e_norm.push_back(ez.norm());
    tr.ey_norm.push_back(ez.norm());  // xhat2 - x2 coincides with e_z
    tr.V.push_back(ez.dot(rg.Q * ez));
    tr.W.push_back(0.0);
    tr.omega.push_back(-dec.sys.fop.min_norm_selection(dec.sys.C * x));
    Vec x1 = measured_x1(x);
    tr.omega_hat.push_back(
        -dec.sys.fop.min_norm_selection(dec.C2 * zh + Cx1 * x1));
  };

  Vec s0(d.n + nq);
  s0.head(d.n) = x0;
  s0.tail(nq) = zhat0;
  Trajectory tr = run_grid(RunKind::Reduced, cfg, s0, rhs, record);
  tr.warnings.insert(tr.warnings.end(), pending_warnings.begin(),
                     pending_warnings.end());
  return tr;
}

std::vector<double> extract_series(const Trajectory& traj,
                                   const SeriesSelector& sel) {
  const std::size_t n = traj.size();
  std::vector<double> out(n);
  auto component = [&](const std::vector<Vec>& vs, const char* what) {
    if (vs.empty() || sel.index < 0 || sel.index >= vs.front().size())
      throw std::invalid_argument(std::string("extract_series: bad index for ") +
                                  what);
    for (std::size_t i = 0; i < n; ++i) out[i] = vs[i][sel.index];
  };
  switch (sel.kind) {
    case SeriesSelector::Kind::State:
      component(traj.x, "state");
      break;
    case SeriesSelector::Kind::ObserverState:
      component(traj.x_hat, "observer state");
      break;
    case SeriesSelector::Kind::Error: {
      if (traj.kind != RunKind::FullObserver &&
          traj.kind != RunKind::BoundedObserver)
        throw std::invalid_argument(
            "extract_series: Error selector needs a full-order observer run");
      if (traj.x.empty() || sel.index < 0 || sel.index >= traj.x.front().size())
        throw std::invalid_argument("extract_series: bad index for error");
      for (std::size_t i = 0; i < n; ++i)
        out[i] = traj.x_hat[i][sel.index] - traj.x[i][sel.index];
      break;
    }
    case SeriesSelector::Kind::Omega:
      component(traj.omega, "omega");
      break;
    case SeriesSelector::Kind::OmegaHat:
      component(traj.omega_hat, "omega_hat");
      break;
    case SeriesSelector::Kind::ENorm:
      out = traj.e_norm;
      break;
    case SeriesSelector::Kind::EyNorm:
      out = traj.ey_norm;
      break;
    case SeriesSelector::Kind::V:
      out = traj.V;
      break;
    case SeriesSelector::Kind::W:
      out = traj.W;
      break;
  }
  if (out.size() != n)
    throw std::invalid_argument("extract_series: series not recorded for run");
  return out;
}

ChatteringIndex chattering_index(const Trajectory& traj,
                                 const SeriesSelector& sel,
                                 double window_fraction) {
  if (!(window_fraction > 0) || window_fraction > 1)
    throw std::invalid_argument(
        "chattering_index: window_fraction must lie in (0, 1]");
  if (traj.size() < 2)
    throw std::invalid_argument("chattering_index: trajectory too short");
  const std::vector<double> s = extract_series(traj, sel);
  const double t_end = traj.times.back();
  const double t_start =
      t_end - window_fraction * (t_end - traj.times.front());
  std::size_t first = 0;
  while (first < traj.size() && traj.times[first] < t_start) ++first;
  if (traj.size() - first < 2)
    throw std::invalid_argument("chattering_index: window contains < 2 samples");

  ChatteringIndex ci;
  ci.window_duration = traj.times.back() - traj.times[first];
  int last_sign = 0;
  double amp = 0;
  for (std::size_t i = first; i < traj.size(); ++i) {
    amp += std::abs(s[i]);
    const int sg = s[i] > 0 ? 1 : (s[i] < 0 ? -1 : 0);
    if (sg != 0) {
      if (last_sign != 0 && sg != last_sign) ++ci.switch_count;
      last_sign = sg;
    }
  }
  ci.mean_amplitude = amp / static_cast<double>(traj.size() - first);
  ci.switches_per_unit_time =
      ci.window_duration > 0 ? ci.switch_count / ci.window_duration : 0.0;
  return ci;
}

std::optional<double> convergence_time(const Trajectory& traj,
                                       const SeriesSelector& sel, double tol) {
  if (traj.size() == 0) return std::nullopt;
  const std::vector<double> s = extract_series(traj, sel);
  std::size_t i = traj.size();
  while (i > 0 && std::abs(s[i - 1]) <= tol) --i;
  if (i == traj.size()) return std::nullopt;  // still above tol at the end
  return traj.times[i];  // i == 0 -> within tol from the start
}

std::optional<double> first_crossing_time(const Trajectory& traj,
                                          const SeriesSelector& sel,
                                          double tol) {
  const std::vector<double> s = extract_series(traj, sel);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s[i]) <= tol) return traj.times[i];
  return std::nullopt;
}

namespace {

void put(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!row.empty()) row += ',';
  row += buf;
}

void vec_header(std::string& h, const char* base, Eigen::Index count,
                bool always_index) {
  for (Eigen::Index i = 0; i < count; ++i) {
    h += ',';
    h += base;
    if (always_index || count > 1) h += '_' + std::to_string(i + 1);
  }
}

}  // namespace

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);

  const Eigen::Index n = traj.x.empty() ? 0 : traj.x.front().size();
  const Eigen::Index nh = traj.x_hat.empty() ? 0 : traj.x_hat.front().size();
  const Eigen::Index m = traj.omega.empty() ? 0 : traj.omega.front().size();
  const bool observer = traj.kind != RunKind::PlantOnly;
  const char* hat_base =
      traj.kind == RunKind::Reduced ? "zhat" : "xhat";

  std::string header = "t";
  vec_header(header, "x", n, true);
  if (observer) {
    vec_header(header, hat_base, nh, true);
    header += ",e_norm,ey_norm,V,W";
  }
  vec_header(header, "omega", m, false);
  if (observer) vec_header(header, "omega_hat", m, false);
  out << header << '\n';

  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::string row;
    put(row, traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) put(row, traj.x[k][i]);
    if (observer) {
      for (Eigen::Index i = 0; i < nh; ++i) put(row, traj.x_hat[k][i]);
      put(row, traj.e_norm[k]);
      put(row, traj.ey_norm[k]);
      put(row, traj.V[k]);
      put(row, traj.W[k]);
    }
    for (Eigen::Index i = 0; i < m; ++i) put(row, traj.omega[k][i]);
    if (observer)
      for (Eigen::Index i = 0; i < m; ++i) put(row, traj.omega_hat[k][i]);
    out << row << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace lureobs
