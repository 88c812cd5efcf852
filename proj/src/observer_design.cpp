#include "lureobs/observer_design.hpp"

#include <cmath>
#include <stdexcept>

namespace lureobs {

namespace {

void require_spd(const Mat& P, const char* who) {
  if (P.rows() != P.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const double scale = P.norm();
  if ((P - P.transpose()).norm() > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
  if (!(sym_eig_min(P) > 0))
    throw std::invalid_argument(std::string(who) +
                                ": matrix must be positive definite");
}

// (F P^-1 F^T)^-1 F, the projector factor shared by h, the certificates and
// the range test. Throws when F is not full row rank.
Mat projector_factor(const Mat& P, const Mat& F) {
  require_spd(P, "projector_factor(P)");
  if (F.cols() != P.rows())
    throw std::invalid_argument("projector_factor: F and P are incompatible");
  Eigen::JacobiSVD<Mat> svd(F);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(F.rows() - 1);
  if (F.rows() > F.cols() || !(smin > 1e-10 * smax))
    throw std::invalid_argument("F must have full row rank");
  Mat PinvFt = P.llt().solve(F.transpose());  // n x p
  Mat S = F * PinvFt;                         // p x p, SPD
  return S.llt().solve(F);                    // p x n
}

}  // namespace

void ObserverGains::validate() const {
  require_spd(P, "ObserverGains");
  const auto n = P.rows();
  if (L.rows() != n) throw std::invalid_argument("ObserverGains: bad L shape");
  if (K.cols() != L.cols())
    throw std::invalid_argument("ObserverGains: K and L disagree on p");
  if (!(beta > 0)) throw std::invalid_argument("ObserverGains: beta must be > 0");
  if (!(epsilon > 0))
    throw std::invalid_argument("ObserverGains: epsilon must be > 0");
}

Mat ReducedGains::K() const {
  return P22.fullPivLu().solve(P21);
}

void ReducedGains::validate() const {
  require_spd(Q, "ReducedGains");
  const auto nq = Q.rows();
  if (P21.rows() != nq || P22.rows() != nq || P22.cols() != nq)
    throw std::invalid_argument("ReducedGains: block shapes inconsistent");
  Eigen::FullPivLU<Mat> lu(P22);
  if (!lu.isInvertible())
    throw std::invalid_argument("ReducedGains: P22 must be invertible");
  if (!(epsilon > 0))
    throw std::invalid_argument("ReducedGains: epsilon must be > 0");
}

bool VerdictReport::all_pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return !conditions.empty();
}

const ConditionVerdict* VerdictReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<Sample> sample_box(const SystemDims& dims, double x_radius,
                               double u_radius, int count,
                               std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("sample_box: count must be >= 1");
  Rng rng(seed);
  std::vector<Sample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back({rng.uniform_vec(dims.n, -x_radius, x_radius),
                   rng.uniform_vec(dims.r, -u_radius, u_radius)});
  return out;
}

HFunction compute_h(const LureSystem& sys, const Mat& P, const Mat& F,
                    const std::vector<Sample>& samples) {
  Mat G = projector_factor(P, F);  // p x n
  MatrixFn f2 = sys.f2;
  HFunction out;
  out.h = [G, f2](const Vec& x, const Vec& u) -> Mat {
    return (G * f2(x, u)).transpose();  // l x p
  };
  out.residuals.reserve(samples.size());
  for (const auto& s : samples) {
    Mat hv = out.h(s.x, s.u);
    out.empirical_bound = std::max(out.empirical_bound, spectral_norm(hv));
    const double res =
        (sys.f2(s.x, s.u).transpose() * P - hv * F).cwiseAbs().maxCoeff();
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

VerdictReport check_observer_design(const LureSystem& sys,
                                const ObserverGains& gains,
                                const LipschitzBounds& bounds, double gamma,
                                const std::vector<Sample>& samples,
                                double tol_psd) {
  sys.validate();
  gains.validate();
  if (!(gamma >= 0))
    throw std::invalid_argument("check_observer_design: gamma must be >= 0");
  (void)bounds;  // constants are carried by the caller; gamma is explicit
  const Mat& P = gains.P;
  const int n = sys.dims.n;

  VerdictReport rep;
  rep.gamma = gamma;

  Mat Acl = sys.A - gains.L * sys.F;
  Mat M = P * Acl + Acl.transpose() * P + gamma * P * P +
          (gamma + gains.epsilon) * Mat::Identity(n, n);
  rep.conditions.push_back(
      {"lmi", sym_eig_max(M), tol_psd, sym_eig_max(M) <= tol_psd});

  Mat lhs = sys.B.transpose() * P;
  Mat rhs = sys.C - gains.K * sys.F;
  const double r2 = (lhs - rhs).cwiseAbs().maxCoeff();
  const double scale2 =
      std::max({1.0, lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
  rep.conditions.push_back(
      {"output_equality", r2, 1e-9 * scale2, r2 <= 1e-9 * scale2});

  HFunction h = compute_h(sys, P, sys.F, samples);
  double scale3 = 1.0;
  for (const auto& s : samples)
    scale3 = std::max(scale3,
                      (sys.f2(s.x, s.u).transpose() * P).cwiseAbs().maxCoeff());
  rep.conditions.push_back({"h_factorization", h.max_residual, 1e-8 * scale3,
                            h.max_residual <= 1e-8 * scale3});
  return rep;
}

VerdictReport check_reduced_design(const DecomposedSystem& dec,
                                     const ReducedGains& rg,
                                     const LipschitzBounds& bounds,
                                     const std::vector<Sample>& samples,
                                     double tol_psd) {
  rg.validate();
  const int nq = dec.sys.dims.n - dec.q;
  if (rg.Q.rows() != nq)
    throw std::invalid_argument(
        "check_reduced_design: Q size disagrees with decomposition");

  VerdictReport rep;
  Mat K = rg.K();
  Mat Acl = dec.A22 + K * dec.A12;
  Mat M = rg.Q * Acl + Acl.transpose() * rg.Q +
          bounds.L1 * rg.Q * (K * K.transpose() + Mat::Identity(nq, nq)) * rg.Q +
          (bounds.L1 + rg.epsilon) * Mat::Identity(nq, nq);
  rep.conditions.push_back(
      {"lmi", sym_eig_max(M), tol_psd, sym_eig_max(M) <= tol_psd});

  Mat lhs = (dec.B2 + K * dec.B1).transpose() * rg.Q;
  const double r2 = (lhs - dec.C2).cwiseAbs().maxCoeff();
  const double scale2 = std::max(
      {1.0, lhs.cwiseAbs().maxCoeff(), dec.C2.cwiseAbs().maxCoeff()});
  rep.conditions.push_back(
      {"output_equality", r2, 1e-9 * scale2, r2 <= 1e-9 * scale2});

  Mat P2(nq, dec.sys.dims.n);  // (P21 P22)
  P2.leftCols(dec.q) = rg.P21;
  P2.rightCols(nq) = rg.P22;
  double r3 = 0, f2max = 0;
  for (const auto& s : samples) {
    Mat f2v = dec.sys.f2(s.x, s.u);
    r3 = std::max(r3, (P2 * f2v).cwiseAbs().maxCoeff());
    f2max = std::max(f2max, f2v.cwiseAbs().maxCoeff());
  }
  const double scale3 = std::max(1.0, P2.cwiseAbs().maxCoeff() * f2max);
  rep.conditions.push_back(
      {"f2_annihilation", r3, 1e-8 * scale3, r3 <= 1e-8 * scale3});
  return rep;
}

double projector_residual_at(const Mat& P, const Mat& F, const Vec& x) {
  Mat G = projector_factor(P, F);
  Vec lhs = F.transpose() * (G * x);
  Vec px = P * x;
  const double denom = px.norm();
  if (denom == 0.0) return 0.0;
  return (lhs - px).norm() / denom;
}

double projector_identity_check(const Mat& P, const Mat& F, int trials,
                             std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("projector_identity_check: trials must be >= 1");
  Mat G = projector_factor(P, F);  // validates P, F
  Mat PinvFt = P.llt().solve(F.transpose());
  Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < trials; ++i) {
    Vec z = rng.uniform_vec(F.rows(), -1.0, 1.0);
    Vec x = PinvFt * z;  // a point of im(P^-1 F^T)
    Vec px = P * x;
    const double denom = px.norm();
    if (denom == 0.0) continue;
    worst = std::max(worst, (F.transpose() * (G * x) - px).norm() / denom);
  }
  return worst;
}

double range_residual(const Mat& P, const Mat& F, const Mat& M) {
  Mat G = projector_factor(P, F);
  Mat pm = P * M;
  const double denom = pm.norm();
  if (denom == 0.0) return 0.0;
  return (F.transpose() * (G * M) - pm).norm() / denom;
}

double Certificate::envelope(double t) const {
  return envelope_scale * std::exp(-rate * t);
}

namespace {

Certificate exponential_part(const ObserverGains& gains, double V0,
                             const VerdictReport& report) {
  if (!report.all_pass())
    throw std::domain_error(
        "certificate refused: design conditions did not pass");
  if (!(V0 >= 0))
    throw std::invalid_argument("certificate: V0 must be >= 0");
  gains.validate();
  Certificate c;
  c.gamma_used = report.gamma;
  c.alpha_max = sym_eig_max(gains.P);
  c.alpha_min = sym_eig_min(gains.P);
  c.rate = gains.epsilon / (2.0 * c.alpha_max);
  c.envelope_scale = std::sqrt(V0 / c.alpha_min);
  c.verdicts = report.conditions;
  return c;
}

}  // namespace

Certificate exponential_certificate(const ObserverGains& gains,
                                    const LipschitzBounds& bounds, double V0,
                                    const VerdictReport& report) {
  (void)bounds;
  return exponential_part(gains, V0, report);
}

Certificate finite_time_certificate(const LureSystem& sys,
                                    const ObserverGains& gains,
                                    const LipschitzBounds& bounds, double V0,
                                    const VerdictReport& report,
                                    std::optional<double> w_at_t1_probe,
                                    bool enforce_range) {
  Certificate c = exponential_part(gains, V0, report);
  if (!bounds.L4.has_value())
    throw std::domain_error(
        "certificate refused: bounded-h certificate needs the L4 bound");
  const double sigma = gains.beta - bounds.L3 * *bounds.L4;
  if (!(sigma > 0))
    throw std::domain_error(
        "certificate refused: sigma = beta - L3*L4 must be positive");

  Mat G = projector_factor(gains.P, sys.F);  // also checks rank of F
  const double rr = range_residual(gains.P, sys.F, sys.B);
  ConditionVerdict range;
  range.name = "range_condition";
  range.residual = rr;
  range.threshold = 1e-8;
  range.pass = rr <= 1e-8;
  if (enforce_range && !range.pass)
    throw std::domain_error(
        "certificate refused: im(B) not contained in im(P^-1 F^T), residual " +
        std::to_string(rr));
  c.verdicts.push_back(range);

  Mat PinvFt = gains.P.llt().solve(sys.F.transpose());
  Mat S = sys.F * PinvFt;  // F P^-1 F^T
  c.finite_time = true;
  c.sigma = sigma;
  c.gamma_max_W = 1.0 / sym_eig_min(S);
  c.kappa = sigma / std::sqrt(2.0 * c.gamma_max_W);

  const double norm_GF = spectral_norm(G);
  const double norm_Acl = spectral_norm(sys.A - gains.L * sys.F);
  const double log_arg =
      2.0 * norm_GF * (norm_Acl + bounds.L1) / sigma * c.envelope_scale;
  c.t1 = log_arg <= 1.0
             ? 0.0
             : (2.0 * c.alpha_max / gains.epsilon) * std::log(log_arg);

  const double envF = spectral_norm(sys.F) * c.envelope(c.t1);
  c.w_at_t1_bound = 0.5 * c.gamma_max_W * envF * envF;
  c.tf_bound_overapprox = c.t1 + 2.0 * std::sqrt(c.w_at_t1_bound) / c.kappa;
  if (w_at_t1_probe) {
    if (!(*w_at_t1_probe >= 0))
      throw std::invalid_argument("certificate: W(t1) probe must be >= 0");
    c.w_at_t1_probe = w_at_t1_probe;
    c.tf_bound = c.t1 + 2.0 * std::sqrt(*w_at_t1_probe) / c.kappa;
  } else {
    c.tf_bound = c.tf_bound_overapprox;
  }
  return c;
}

}  // namespace lureobs
