#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lureobs/experiments.hpp"
#include "lureobs/simulate.hpp"

using namespace lureobs;

namespace {

Vec vecn(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// 3-state variant with a strongly stable A and B inside im(P^-1 F^T); the
// plant stays bounded, so full-horizon observer properties are checkable.
LureSystem stable_demo_system() {
  LureSystem sys = example2_system();
  sys.A = -12.0 * Mat::Identity(3, 3);
  sys.B = Mat::Zero(3, 1);
  sys.B(0, 0) = 1.0;
  sys.C = Mat::Zero(1, 3);
  sys.C(0, 0) = 1.0;
  sys.fop = SetValuedMap::sign_map(1);
  return sys;
}

ObserverGains stable_demo_gains() {
  ObserverGains g = example2_gains();
  g.L = Mat::Zero(3, 1);
  g.K = Mat::Zero(1, 1);
  return g;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path tmp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

// small hand-built scalar trajectory for the metric helpers
Trajectory toy_trajectory(std::initializer_list<double> values, double dt) {
  Trajectory tr;
  tr.kind = RunKind::PlantOnly;
  double t = 0;
  for (double v : values) {
    tr.times.push_back(t);
    tr.x.push_back(vecn({v}));
    tr.omega.push_back(vecn({0}));
    t += dt;
  }
  return tr;
}

}  // namespace

TEST_CASE("sign mode realizations and labels") {
  const SignMode ex = SignMode::exact();
  CHECK(ex.label() == "exact");
  CHECK(ex.realize(0, vecn({3, 4}), 0)[0] == doctest::Approx(0.6));
  CHECK(ex.realize(0, vecn({0, 0}), 0).norm() == 0.0);
  // dead zone maps small arguments to zero
  CHECK(ex.realize(0, vecn({1e-7, 0}), 1e-6).norm() == 0.0);
  CHECK(ex.realize(0, vecn({1e-5, 0}), 1e-6)[0] == 1.0);

  const SignMode sg = SignMode::sigmoid(1e-3, SigmoidVariant::Abs);
  CHECK(sg.label() == "sigmoid:0.001:abs");
  CHECK(sg.realize(0, vecn({1.0}), 0)[0] ==
        sign_sigmoid(vecn({1.0}), 1e-3, SigmoidVariant::Abs)[0]);
  CHECK(SignMode::sigmoid(1e-6, SigmoidVariant::Sqrt).label() ==
        "sigmoid:1e-06:sqrt");
  CHECK_THROWS_AS(SignMode::sigmoid(0, SigmoidVariant::Abs),
                  std::invalid_argument);

  GuidedSignParams p;
  const SignMode gd = SignMode::guided(p);
  CHECK(gd.label() == "guided:0.5:0:1:3");
  CHECK(gd.realize(0, vecn({0.5}), 0)[0] == sign_delta(0, vecn({0.5}), p)[0]);
}

TEST_CASE("fixed grid covers [t0, t_end] and rejects bad steps") {
  const LureSystem sys = example1_system();
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h_step = 0.25;
  const Trajectory tr = simulate_plant(sys, cfg, vecn({0.1}));
  REQUIRE(tr.size() == 5);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 1.0);
  CHECK(tr.times[1] == 0.25);
  CHECK(tr.kind == RunKind::PlantOnly);
  CHECK_FALSE(tr.aborted);

  SimConfig bad = cfg;
  bad.h_step = 0;
  CHECK_THROWS_AS(simulate_plant(sys, bad, vecn({0.1})), std::invalid_argument);
  bad = cfg;
  bad.t_end = -1;
  CHECK_THROWS_AS(simulate_plant(sys, bad, vecn({0.1})), std::invalid_argument);
  CHECK_THROWS_AS(simulate_plant(sys, cfg, vecn({0.1, 0})),
                  std::invalid_argument);
}

TEST_CASE("blow-up guard truncates a diverging run") {
  LureSystem sys = example1_system();
  sys.A = Mat::Identity(1, 1) * 10.0;  // dx/dt = 10x - 4 sgn(x) + 3 sin x
  SimConfig cfg;
  cfg.t_end = 5.0;
  cfg.h_step = 1e-3;
  const Trajectory tr = simulate_plant(sys, cfg, vecn({1.0}));
  CHECK(tr.aborted);
  CHECK(tr.abort_reason.find("blow-up") != std::string::npos);
  CHECK(tr.times.back() < 5.0);
  CHECK(tr.times.back() > 1.0);  // e^{10t} reaches 1e9 near t = 2.07
  for (const auto& x : tr.x) CHECK(x.norm() <= 1e9);
  CHECK(tr.x.size() == tr.times.size());
  CHECK(tr.omega.size() == tr.times.size());
}

TEST_CASE("sign approximations require a Sign-type feedback") {
  const LureSystem sys = example2_system();  // relay feedback
  SimConfig cfg;
  cfg.t_end = 0.1;
  cfg.sign_mode = SignMode::sigmoid(1e-3, SigmoidVariant::Abs);
  CHECK_THROWS_AS(simulate_plant(sys, cfg, example2_x0()),
                  std::invalid_argument);
}

TEST_CASE("scalar sliding demo: exact chatters, guided settles") {
  const LureSystem sys = example1_system();
  SimConfig cfg;
  cfg.t_end = 5.0;
  cfg.h_step = 1e-3;

  const Trajectory exact = simulate_plant(sys, cfg, vecn({0.1}));
  REQUIRE_FALSE(exact.aborted);
  // trailing-half band stays within a few integration steps of zero
  const auto tail = chattering_index(exact, {SeriesSelector::Kind::State, 0}, 0.5);
  CHECK(tail.switches_per_unit_time > 100);
  CHECK(tail.mean_amplitude < 7e-3);
  CHECK(std::abs(exact.x.back()[0]) < 7e-3);

  SimConfig guided = cfg;
  GuidedSignParams p;  // delta(t) = exp(-t/2), M = 1, N = 3
  guided.sign_mode = SignMode::guided(p);
  const Trajectory smooth = simulate_plant(sys, guided, vecn({0.1}));
  const auto tail2 =
      chattering_index(smooth, {SeriesSelector::Kind::State, 0}, 0.5);
  CHECK(tail2.switch_count <= 2);
  CHECK(std::abs(smooth.x.back()[0]) < 1e-4);

  SimConfig sig = cfg;
  sig.sign_mode = SignMode::sigmoid(1e-3, SigmoidVariant::Abs);
  const Trajectory lay = simulate_plant(sys, sig, vecn({0.1}));
  // the boundary layer leaves a visible bias the guided variant removes
  CHECK(std::abs(lay.x.back()[0]) > std::abs(smooth.x.back()[0]));
}

TEST_CASE("full-order observer tracks within the guaranteed envelope") {
  const LureSystem sys = stable_demo_system();
  const ObserverGains gains = stable_demo_gains();
  const LipschitzBounds bounds = example2_bounds();

  SimConfig cfg;
  cfg.t_end = 40.0;
  cfg.h_step = 1e-3;
  const Vec x0 = example2_x0();
  const Vec xhat0 = example2_xhat0();
  const Trajectory tr = simulate_full(sys, gains, bounds, cfg, x0, xhat0);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.kind == RunKind::FullObserver);
  REQUIRE(tr.size() == 40001);

  // recorded functionals at the initial point
  CHECK(tr.e_norm[0] == doctest::Approx(std::sqrt(994.0)).epsilon(1e-15));
  CHECK(tr.V[0] == doctest::Approx(994.0).epsilon(1e-15));
  CHECK(tr.ey_norm[0] == 12.0);       // first error component
  CHECK(tr.W[0] == doctest::Approx(72.0).epsilon(1e-14));  // e_y^2 / 2

  // guaranteed envelope sqrt(994) e^{-0.1 t} with discretization slack
  const double scale = std::sqrt(994.0);
  double worst = 0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double env = 1.05 * scale * std::exp(-0.1 * tr.times[k]) + 0.05;
    worst = std::max(worst, tr.e_norm[k] / env);
  }
  CHECK(worst <= 1.0);

  // quadratic decrease above the switching floor: once V reaches the
  // chatter scale (h*beta*||h||)^2 ~ 1e-3, the exact-sign correction adds
  // first-order-in-h jumps, so per-step monotonicity only holds above it
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    if (tr.V[k] < 1e-2 * 994.0) break;
    monotone = monotone && tr.V[k + 1] <= tr.V[k] * 1.001 + 1e-10;
  }
  CHECK(monotone);
  CHECK(tr.V.back() <= 994.0 * std::exp(-0.2 * 40.0) + 1e-3);

  // halving the step does not loosen the envelope
  SimConfig half = cfg;
  half.h_step = 5e-4;
  const Trajectory tr2 = simulate_full(sys, gains, bounds, half, x0, xhat0);
  double worst2 = 0;
  for (std::size_t k = 0; k < tr2.size(); ++k) {
    const double env = 1.05 * scale * std::exp(-0.1 * tr2.times[k]) + 0.05;
    worst2 = std::max(worst2, tr2.e_norm[k] / env);
  }
  CHECK(worst2 <= worst + 1e-9);
}

TEST_CASE("bounded-h observer reaches the sliding surface in finite time") {
  const LureSystem sys = stable_demo_system();
  const ObserverGains gains = stable_demo_gains();
  const LipschitzBounds bounds = example2_bounds();
  const auto samples = sample_box(sys.dims, 5.0, 8.0, 500, 0);
  const VerdictReport rep =
      check_observer_design(sys, gains, bounds, bounds.gamma(), samples);
  REQUIRE(rep.all_pass());
  const Vec x0 = example2_x0();
  const Vec xhat0 = x0 + vecn({1, 1, 1});
  const double V0 = 3.0;
  const Certificate cert =
      finite_time_certificate(sys, gains, bounds, V0, rep);

  SimConfig cfg;
  cfg.t_end = 8.0;
  cfg.h_step = 1e-3;
  const Trajectory tr = simulate_bounded_h(sys, gains, bounds, cfg, x0, xhat0);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.kind == RunKind::BoundedObserver);

  // grid samples straddle the switching band (per-step slew ~ h*beta),
  // so the crossing tolerance must sit at that scale, not at eps
  const auto crossing =
      first_crossing_time(tr, {SeriesSelector::Kind::EyNorm, 0}, 2e-2);
  REQUIRE(crossing.has_value());
  CHECK(*crossing <= cert.tf_bound);
  CHECK(*crossing < 4.0);  // reaches long before the conservative bound

  // sliding is maintained once reached (within the per-step switching band)
  for (std::size_t k = 0; k < tr.size(); ++k)
    if (tr.times[k] >= *crossing + 1.0) CHECK(tr.ey_norm[k] <= 0.05);

  // the full error also contracts under the exponential envelope
  const double scale = std::sqrt(3.0);
  for (std::size_t k = 0; k < tr.size(); ++k)
    CHECK(tr.e_norm[k] <=
          1.05 * scale * std::exp(-0.1 * tr.times[k]) + 0.05);
}

TEST_CASE("observer preconditions refuse or warn") {
  const LureSystem sys = stable_demo_system();
  const LipschitzBounds bounds = example2_bounds();
  SimConfig cfg;
  cfg.t_end = 0.1;

  ObserverGains weak = stable_demo_gains();
  weak.beta = 2.0;  // beta < L3 = 3
  CHECK_THROWS_AS(simulate_full(sys, weak, bounds, cfg, example2_x0(),
                                example2_xhat0()),
                  std::domain_error);
  SimConfig loose = cfg;
  loose.allow_unverified = true;
  const Trajectory tr = simulate_full(sys, weak, bounds, loose, example2_x0(),
                                      example2_xhat0());
  REQUIRE_FALSE(tr.warnings.empty());
  CHECK(tr.warnings.front().find("beta") != std::string::npos);

  // bounded-h needs L4; beta must exceed L3 L4
  LipschitzBounds no_l4 = bounds;
  no_l4.L4.reset();
  CHECK_THROWS_AS(simulate_bounded_h(sys, stable_demo_gains(), no_l4, cfg,
                                     example2_x0(), example2_xhat0()),
                  std::domain_error);
  ObserverGains tight = stable_demo_gains();
  tight.beta = 9.0;  // == L3 L4, not strictly above
  CHECK_THROWS_AS(simulate_bounded_h(sys, tight, bounds, cfg, example2_x0(),
                                     example2_xhat0()),
                  std::domain_error);
}

TEST_CASE("identical initial data gives an exactly zero error trajectory") {
  LureSystem sys = stable_demo_system();
  sys.f2 = zero_matrix_fn(1);
  sys.theta = zero_theta_fn(1);
  const ObserverGains gains = stable_demo_gains();
  const LipschitzBounds bounds = example2_bounds();

  SimConfig cfg;
  cfg.t_end = 20.0;
  cfg.h_step = 1e-3;
  const Vec x0 = example2_x0();

  for (const bool bounded : {false, true}) {
    const Trajectory tr =
        bounded ? simulate_bounded_h(sys, gains, bounds, cfg, x0, x0)
                : simulate_full(sys, gains, bounds, cfg, x0, x0);
    REQUIRE_FALSE(tr.aborted);
    bool all_zero = true, functionals_zero = true, feedback_synced = true;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      all_zero = all_zero && tr.e_norm[k] == 0.0 && tr.ey_norm[k] == 0.0;
      functionals_zero = functionals_zero && tr.V[k] == 0.0 && tr.W[k] == 0.0;
      feedback_synced =
          feedback_synced && (tr.omega[k] - tr.omega_hat[k]).norm() == 0.0;
    }
    CHECK(all_zero);
    CHECK(functionals_zero);
    CHECK(feedback_synced);
  }
}

TEST_CASE("reduced-order observer: exact start stays exact, offset start converges") {
  const LureSystem sys = reduced_demo_system();
  const DecomposedSystem dec = decompose(sys, reduced_demo_q());
  const ReducedGains rg = reduced_demo_gains();
  const LipschitzBounds bounds = reduced_demo_bounds();
  const auto samples = sample_box(sys.dims, 5.0, 8.0, 500, 0);
  const VerdictReport rep = check_reduced_design(dec, rg, bounds, samples);
  REQUIRE(rep.all_pass());

  SimConfig cfg;
  cfg.t_end = 30.0;
  cfg.h_step = 1e-3;
  const Vec x0 = reduced_demo_x0();

  // z0 = x2 + K x1 = -1 for K = 0
  const Trajectory sync =
      simulate_reduced(dec, rg, bounds, rep, cfg, x0, vecn({-1}));
  REQUIRE_FALSE(sync.aborted);
  CHECK(sync.kind == RunKind::Reduced);
  // z = x2 + K x1 is recomputed from the co-integrated plant each step while
  // zhat integrates its own rhs, so only rounding-order noise can accumulate
  double sync_max = 0;
  for (double e : sync.e_norm) sync_max = std::max(sync_max, e);
  CHECK(sync_max <= 1e-14);

  const Trajectory tr =
      simulate_reduced(dec, rg, bounds, rep, cfg, x0, reduced_demo_zhat0());
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.e_norm.front() == 3.0);  // zhat0 = 2, z0 = -1
  CHECK(tr.e_norm.back() <= 1e-3);
  // guaranteed decay rate eps / (2 max_eig Q) = 0.1
  const auto reach =
      convergence_time(tr, {SeriesSelector::Kind::ENorm, 0}, 1e-6);
  REQUIRE(reach.has_value());
  CHECK(*reach < 30.0);

  // failed design conditions refuse, or run with a recorded warning
  ReducedGains bad = rg;
  bad.epsilon = 4.0;
  const VerdictReport fail = check_reduced_design(dec, bad, bounds, samples);
  REQUIRE_FALSE(fail.all_pass());
  CHECK_THROWS_AS(simulate_reduced(dec, bad, bounds, fail, cfg, x0,
                                   reduced_demo_zhat0()),
                  std::domain_error);
  SimConfig loose = cfg;
  loose.allow_unverified = true;
  const Trajectory warned = simulate_reduced(dec, bad, bounds, fail, loose, x0,
                                             reduced_demo_zhat0());
  CHECK_FALSE(warned.warnings.empty());

  CHECK_THROWS_AS(
      simulate_reduced(dec, rg, bounds, rep, cfg, x0, vecn({1, 2})),
      std::invalid_argument);
}

TEST_CASE("Euler halves its error with the step; the 4-stage scheme beats it") {
  // smooth surrogate dynamics so the orders are clean
  const LureSystem sys = example1_system();
  const Vec x0 = vecn({0.1});
  auto run = [&](Scheme scheme, double h) {
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.h_step = h;
    cfg.scheme = scheme;
    cfg.sign_mode = SignMode::sigmoid(0.5, SigmoidVariant::Abs);
    return simulate_plant(sys, cfg, x0).x.back()[0];
  };
  const double ref = run(Scheme::Rk4, 2.5e-4);
  const double e1 = std::abs(run(Scheme::Euler, 2e-3) - ref);
  const double e2 = std::abs(run(Scheme::Euler, 1e-3) - ref);
  const double e4 = std::abs(run(Scheme::Rk4, 1e-3) - ref);
  CHECK(e1 / e2 > 1.6);
  CHECK(e1 / e2 < 2.6);
  CHECK(e4 < e2 / 100.0);
}

TEST_CASE("series extraction and selectors") {
  const LureSystem sys = stable_demo_system();
  SimConfig cfg;
  cfg.t_end = 0.5;
  const Trajectory obs = simulate_bounded_h(sys, stable_demo_gains(),
                                            example2_bounds(), cfg,
                                            example2_x0(), example2_xhat0());
  CHECK(extract_series(obs, {SeriesSelector::Kind::State, 2}).front() == 1.0);
  CHECK(extract_series(obs, {SeriesSelector::Kind::ObserverState, 2}).front() ==
        16.0);
  CHECK(extract_series(obs, {SeriesSelector::Kind::Error, 2}).front() == 15.0);
  CHECK(extract_series(obs, {SeriesSelector::Kind::ENorm, 0}).front() ==
        doctest::Approx(std::sqrt(994.0)));
  CHECK(extract_series(obs, {SeriesSelector::Kind::Omega, 0}).size() ==
        obs.size());
  CHECK(extract_series(obs, {SeriesSelector::Kind::OmegaHat, 0}).size() ==
        obs.size());
  CHECK_THROWS_AS(extract_series(obs, {SeriesSelector::Kind::State, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(extract_series(obs, {SeriesSelector::Kind::State, -1}),
                  std::invalid_argument);

  const Trajectory plant = simulate_plant(sys, cfg, example2_x0());
  CHECK_THROWS_AS(extract_series(plant, {SeriesSelector::Kind::Error, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(extract_series(plant, {SeriesSelector::Kind::ENorm, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(extract_series(plant, {SeriesSelector::Kind::OmegaHat, 0}),
                  std::invalid_argument);
}

TEST_CASE("chattering index counts nonzero sign alternations") {
  const Trajectory alt = toy_trajectory({1, -1, 1, -1, 1}, 0.25);
  const auto ci = chattering_index(alt, {SeriesSelector::Kind::State, 0}, 1.0);
  CHECK(ci.switch_count == 4);
  CHECK(ci.mean_amplitude == 1.0);
  CHECK(ci.window_duration == 1.0);
  CHECK(ci.switches_per_unit_time == 4.0);

  // zeros neither switch nor reset the last seen sign
  const Trajectory gap = toy_trajectory({1, 0, -1, 0, -1}, 0.25);
  CHECK(chattering_index(gap, {SeriesSelector::Kind::State, 0}, 1.0)
            .switch_count == 1);

  // trailing window cuts off the early samples
  const Trajectory late = toy_trajectory({1, -1, 1, 5, 5}, 0.25);
  const auto tail =
      chattering_index(late, {SeriesSelector::Kind::State, 0}, 0.5);
  CHECK(tail.switch_count == 0);
  CHECK(tail.mean_amplitude == doctest::Approx(11.0 / 3.0));
  CHECK(tail.window_duration == 0.5);

  CHECK_THROWS_AS(chattering_index(alt, {SeriesSelector::Kind::State, 0}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(chattering_index(alt, {SeriesSelector::Kind::State, 0}, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      chattering_index(toy_trajectory({1}, 0.1), {SeriesSelector::Kind::State, 0},
                       1.0),
      std::invalid_argument);
}

TEST_CASE("convergence and crossing times on a hand-built series") {
  const Trajectory tr = toy_trajectory({5, 3, 0.5, 0.2, 0.05, 0.04}, 1.0);
  const SeriesSelector s{SeriesSelector::Kind::State, 0};
  CHECK(convergence_time(tr, s, 0.1).value() == 4.0);
  CHECK(convergence_time(tr, s, 10.0).value() == 0.0);
  CHECK_FALSE(convergence_time(tr, s, 0.01).has_value());
  CHECK(first_crossing_time(tr, s, 0.5).value() == 2.0);
  CHECK(first_crossing_time(tr, s, 100.0).value() == 0.0);
  CHECK_FALSE(first_crossing_time(tr, s, 1e-3).has_value());

  // the trailing-run semantics differ from the first crossing
  const Trajectory dip = toy_trajectory({5, 0.01, 3, 0.02, 0.01}, 1.0);
  CHECK(first_crossing_time(dip, s, 0.1).value() == 1.0);
  CHECK(convergence_time(dip, s, 0.1).value() == 3.0);
}

TEST_CASE("CSV export: stable headers, full precision, deterministic bytes") {
  const LureSystem sys = stable_demo_system();
  SimConfig cfg;
  cfg.t_end = 0.02;
  cfg.h_step = 1e-2;
  const Trajectory obs = simulate_bounded_h(sys, stable_demo_gains(),
                                            example2_bounds(), cfg,
                                            example2_x0(), example2_xhat0());
  const auto p1 = tmp_path("lureobs_csv_a.csv");
  const auto p2 = tmp_path("lureobs_csv_b.csv");
  write_csv(obs, p1.string());
  write_csv(obs, p2.string());
  const std::string body = read_file(p1);
  CHECK(body == read_file(p2));

  std::istringstream lines(body);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "t,x_1,x_2,x_3,xhat_1,xhat_2,xhat_3,e_norm,ey_norm,V,W,omega,omega_hat");
  int rows = 0;
  std::string row, first_row;
  while (std::getline(lines, row))
    if (!row.empty() && ++rows == 1) first_row = row;
  CHECK(rows == 3);

  // 17-digit round trip of the initial row
  double t0, x1;
  REQUIRE(std::sscanf(first_row.c_str(), "%lf,%lf", &t0, &x1) == 2);
  CHECK(t0 == 0.0);
  CHECK(x1 == 3.0);
  CHECK(first_row.find("31.527765540868891") != std::string::npos);  // e_norm

  const Trajectory plant = simulate_plant(sys, cfg, example2_x0());
  const auto p3 = tmp_path("lureobs_csv_c.csv");
  write_csv(plant, p3.string());
  std::istringstream pl(read_file(p3));
  std::getline(pl, header);
  CHECK(header == "t,x_1,x_2,x_3,omega");

  const LureSystem red_sys = reduced_demo_system();
  const DecomposedSystem dec = decompose(red_sys, reduced_demo_q());
  const auto samples = sample_box(red_sys.dims, 5.0, 8.0, 100, 0);
  const VerdictReport rep = check_reduced_design(dec, reduced_demo_gains(),
                                                   reduced_demo_bounds(),
                                                   samples);
  const Trajectory red =
      simulate_reduced(dec, reduced_demo_gains(), reduced_demo_bounds(), rep,
                       cfg, reduced_demo_x0(), reduced_demo_zhat0());
  const auto p4 = tmp_path("lureobs_csv_d.csv");
  write_csv(red, p4.string());
  std::istringstream rl(read_file(p4));
  std::getline(rl, header);
  CHECK(header == "t,x_1,x_2,zhat_1,e_norm,ey_norm,V,W,omega,omega_hat");

  for (const auto& p : {p1, p2, p3, p4}) std::filesystem::remove(p);
  CHECK_THROWS_AS(write_csv(obs, "/nonexistent_dir_zz/out.csv"),
                  std::runtime_error);
}
