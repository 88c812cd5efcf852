#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lureobs/experiments.hpp"
#include "lureobs/lure_system.hpp"

using namespace lureobs;

namespace {

Vec vecn(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("plant vector field on the bundled 3-state demo") {
  const LureSystem sys = example2_system();
  sys.validate();

  // x = (3,2,1), u = 8: Cx = 13 > 0, so the relay branch gives
  // w = -(2*13 + 5) = -31; A x = (7, 25.2, -1); f2 theta vanishes at t = 0.
  const Vec x = vecn({3, 2, 1});
  const Vec u = vecn({8});
  const Vec rhs = plant_rhs(sys, 0.0, x, u);
  REQUIRE(rhs.size() == 3);
  CHECK(rhs[0] == doctest::Approx(-30.272562058539453).epsilon(1e-15));
  CHECK(rhs[1] == doctest::Approx(133.3090067530596).epsilon(1e-15));
  CHECK(rhs[2] == doctest::Approx(-132.32682321215367).epsilon(1e-15));

  // at t = pi/2 the disturbance contributes f2(x,u) * 3:
  // first component gains 3 sin(2) * 3
  const Vec rhs2 = plant_rhs(sys, std::asin(1.0), x, u);
  CHECK(rhs2[0] - rhs[0] == doctest::Approx(9 * std::sin(2.0)).epsilon(1e-12));
  CHECK(rhs2[1] == rhs[1]);

  // on the switching surface Cx = 0 the minimal-norm selection is 0
  const Vec xs = vecn({0, 0, 0});
  const Vec rhs0 = plant_rhs(sys, 0.0, xs, u);
  CHECK(rhs0[0] == doctest::Approx(3 * 8.0).epsilon(1e-15));  // B w term absent

  CHECK_THROWS_AS(plant_rhs(sys, 0.0, vecn({1, 2}), u), std::invalid_argument);
  CHECK_THROWS_AS(plant_rhs(sys, 0.0, x, vecn({1, 2})), std::invalid_argument);
}

TEST_CASE("validate rejects inconsistent shapes") {
  LureSystem sys = example2_system();
  sys.B = Mat::Zero(2, 1);
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = example2_system();
  sys.C = Mat::Zero(1, 2);
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = example2_system();
  sys.fop = SetValuedMap::sign_map(2);  // m = 1 in the demo
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = example2_system();
  sys.dims.n = 0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}

TEST_CASE("zero nonlinearity factories return zeros of the right shape") {
  const auto f1 = zero_state_fn();
  const auto f2 = zero_matrix_fn(2);
  const auto th = zero_theta_fn(2);
  const auto in = zero_input_fn(3);
  const Vec x = vecn({1, 2, 3});
  const Vec u = vecn({4});
  CHECK(f1(x, u).norm() == 0.0);
  CHECK(f1(x, u).size() == 3);
  CHECK(f2(x, u).norm() == 0.0);
  CHECK(f2(x, u).cols() == 2);
  CHECK(th(1.0, x, u).norm() == 0.0);
  CHECK(th(1.0, x, u).size() == 2);
  CHECK(in(1.0).norm() == 0.0);
  CHECK(in(1.0).size() == 3);
}

TEST_CASE("block decomposition splits and reassembles") {
  const LureSystem sys = example2_system();
  const DecomposedSystem dec = decompose(sys, 1);

  CHECK(dec.q == 1);
  CHECK(dec.A11(0, 0) == -1.0);
  CHECK(dec.A12(0, 0) == 5.0);
  CHECK(dec.A12(0, 1) == 0.0);
  CHECK(dec.A21(0, 0) == 9.0);
  CHECK(dec.A21(1, 0) == 0.0);
  CHECK(dec.A22(0, 0) == -0.9);
  CHECK(dec.A22(1, 1) == -1.0);
  CHECK(dec.B1(0, 0) == 2.0);
  CHECK(dec.B2(0, 0) == -3.0);
  CHECK(dec.B2(1, 0) == 4.0);
  CHECK(dec.C1(0, 0) == 5.0);
  CHECK(dec.C2(0, 0) == -3.0);
  CHECK(dec.C2(0, 1) == 4.0);
  CHECK(dec.Fq(0, 0) == 1.0);

  CHECK((dec.reassembled_A() - sys.A).norm() == 0.0);
  CHECK((dec.reassembled_B() - sys.B).norm() == 0.0);
  CHECK((dec.reassembled_C() - sys.C).norm() == 0.0);
  CHECK((dec.reassembled_F() - sys.F).norm() == 0.0);

  // row split of f1 at a sample point
  const Vec x = vecn({3, 2, 1});
  const Vec u = vecn({8});
  const Vec full = sys.f1(x, u);
  CHECK(dec.f11(x, u)[0] == full[0]);
  CHECK(dec.f12(x, u)[0] == full[1]);
  CHECK(dec.f12(x, u)[1] == full[2]);
  CHECK(dec.f21(x, u)(0, 0) == sys.f2(x, u)(0, 0));
  CHECK(dec.f22(x, u).norm() == 0.0);
}

TEST_CASE("decomposition rejects unusable output maps") {
  const LureSystem sys = example2_system();
  CHECK_THROWS_AS(decompose(sys, 0), std::invalid_argument);
  CHECK_THROWS_AS(decompose(sys, 3), std::invalid_argument);
  CHECK_THROWS_AS(decompose(sys, 2), std::invalid_argument);  // p != q

  LureSystem shifted = sys;
  shifted.F = Mat::Zero(1, 3);
  shifted.F(0, 1) = 1.0;  // measures x2, so F != (Fq 0) with invertible Fq
  CHECK_THROWS_AS(decompose(shifted, 1), std::invalid_argument);
}

TEST_CASE("declared constants survive a sampled probe at the true rates") {
  const LureSystem sys = example2_system();

  // the actual Lipschitz constant of f1 is 0.9; probing with it finds
  // nothing, probing with the bundled 0.8 flags a few pairs near the peak
  LipschitzBounds tight;
  tight.L1 = 0.9;
  tight.L2 = 3;
  tight.L3 = 3;
  const auto clean = spot_check_lipschitz(sys, tight, 5.0, 10000, 0);
  CHECK(clean.violations_f1 == 0);
  CHECK(clean.violations_f2 == 0);
  CHECK(clean.violations_theta == 0);
  CHECK(clean.worst_ratio_f1 <= 0.9);
  CHECK(clean.worst_ratio_f2 <= 3.0);
  CHECK(clean.worst_theta_norm <= 3.0);

  const auto loose = spot_check_lipschitz(sys, example2_bounds(), 5.0, 10000, 0);
  CHECK(loose.violations_f1 > 0);
  CHECK(loose.worst_ratio_f1 > 0.8);
  CHECK(loose.worst_ratio_f1 <= 0.9);

  // determinism in the seed
  const auto again = spot_check_lipschitz(sys, example2_bounds(), 5.0, 10000, 0);
  CHECK(again.violations_f1 == loose.violations_f1);
  CHECK(again.worst_ratio_f1 == loose.worst_ratio_f1);
}

TEST_CASE("gamma combines the declared constants") {
  LipschitzBounds b;
  b.L1 = 0.8;
  b.L2 = 3;
  b.L3 = 3;
  CHECK(b.gamma() == doctest::Approx(9.8).epsilon(1e-15));
  CHECK_FALSE(b.L4.has_value());
  CHECK(example2_bounds().L4.value() == 3.0);
}
