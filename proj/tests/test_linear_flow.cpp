#include <doctest.h>

#include <cmath>
#include <random>

#include "hamrot/errors.hpp"
#include "hamrot/linear_flow.hpp"
#include "support/oracle.hpp"

using namespace hamrot;
using oracle::kPi;

namespace {

double dist(const Mat2& a, const Mat2& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("fundamental matrix of the zero system is the identity") {
  const CoeffPath S = CoeffPath::constant(0.0, 0.0, 0.0, 1.0);
  const FundamentalPath p = integrate_fundamental(S, 5.0);
  CHECK(dist(p.terminal, Mat2::identity()) < 1e-14);
  CHECK(dist(p.at(2.3), Mat2::identity()) < 1e-14);
}

TEST_CASE("fundamental matrix matches closed-form exponentials") {
  struct Case {
    double a, b, c;
  };
  for (const Case& k : {Case{1, 0, 1}, Case{-1, 0, 1}, Case{2.0, 0.3, 0.7}, Case{-0.5, 0.2, 1.5}, Case{0, 0, 1}}) {
    const CoeffPath S = CoeffPath::constant(k.a, k.b, k.c, 1.0);
    const FundamentalPath p = integrate_fundamental(S, 3.0);
    CHECK(dist(p.terminal, oracle::const_flow(k.a, k.b, k.c, 3.0)) < 1e-9);
    for (double t : {0.0, 0.37, 1.1, 2.5, 3.0}) CHECK(dist(p.at(t), oracle::const_flow(k.a, k.b, k.c, t)) < 1e-9);
    CHECK(symplectic_residual(p.terminal) < 1e-10);
  }
  // S = I: M(t) = [[cos t, sin t], [-sin t, cos t]].
  const Mat2 M = monodromy(CoeffPath::constant(1, 0, 1, 1.0), 1.3);
  CHECK(M.m11 == doctest::Approx(std::cos(1.3)));
  CHECK(M.m12 == doctest::Approx(std::sin(1.3)));
  CHECK(M.m21 == doctest::Approx(-std::sin(1.3)));
  // u'' - u = 0: [[cosh t, sinh t], [sinh t, cosh t]].
  const Mat2 H = monodromy(CoeffPath::constant(-1, 0, 1, 1.0), 1.3);
  CHECK(H.m11 == doctest::Approx(std::cosh(1.3)));
  CHECK(H.m12 == doctest::Approx(std::sinh(1.3)));
  CHECK(H.m21 == doctest::Approx(std::sinh(1.3)));
}

TEST_CASE("fundamental matrix of random systems agrees with RK4 and stays symplectic") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 5; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const FundamentalPath p = integrate_fundamental(S, S.T);
    CHECK(dist(p.terminal, oracle::rk4_flow(S, 0.0, S.T)) < 1e-8 * (1 + p.terminal.norm()));
    CHECK(dist(p.at(0.0), Mat2::identity()) < 1e-14);
    for (const Mat2& v : p.values) CHECK(symplectic_residual(v) <= 10 * kDefaultTol * (1 + v.norm() * v.norm()));
  }
}

TEST_CASE("angle lift examples") {
  const AngularSolution z = angle_lift(CoeffPath::constant(0, 0, 0, 1.0), 0.4, 3.0);
  CHECK(z.theta(2.0) == doctest::Approx(0.4));
  CHECK(z.r(2.0) == doctest::Approx(1.0));

  const AngularSolution rot = angle_lift(CoeffPath::constant(1, 0, 1, 1.0), 0.4, 7.0);
  for (double t : {0.0, 1.0, 3.3, 7.0}) {
    CHECK(rot.theta(t) == doctest::Approx(0.4 + t).epsilon(1e-11));
    CHECK(rot.r(t) == doctest::Approx(1.0).epsilon(1e-11));
  }

  const AngularSolution sad = angle_lift(CoeffPath::constant(-1, 0, 1, 1.0), 0.0, 4.0);
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double t = 0.1 * i;
    CHECK(sad.theta(t) == doctest::Approx(-std::atan(std::tanh(t))).epsilon(1e-10));
    CHECK(sad.theta(t) < prev);
    prev = sad.theta(t);
  }
  CHECK(sad.theta(4.0) > -kPi / 4);
}

TEST_CASE("angle lift reproduces the fundamental matrix") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> W(0.0, kPi);
  for (int n = 0; n < 20; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const double w = W(rng);
    const Mat2 M = monodromy(S, S.T);
    const Vec2 z = M * Vec2{std::cos(w), -std::sin(w)};
    const AngularSolution a = angle_lift(S, w, S.T);
    const double r = a.r_end();
    const double th = a.theta_end;
    CHECK(std::hypot(z[0] - r * std::cos(th), z[1] + r * std::sin(th)) <= 1e-7);
    CHECK(a.theta(0.0) == doctest::Approx(w));
    CHECK(a.r(0.0) == doctest::Approx(1.0));
    // atan2 reconstruction as a cross-check of the lifted winding.
    CHECK(std::abs(winding(S, 1, w) - oracle::rk4_winding(S, w)) < 1e-7);
  }
}

TEST_CASE("winding examples") {
  CHECK(winding(CoeffPath::constant(0, 0, 0, 1.0), 3, 0.7) == doctest::Approx(0.0));
  for (double w : {0.0, 0.5, 2.0}) CHECK(winding(CoeffPath::constant(1, 0, 1, 2 * kPi), 1, w) == doctest::Approx(1.0));
  const double s = winding(CoeffPath::constant(-1, 0, 1, 1.0), 1, 0.0);
  CHECK(s < 0.0);
  CHECK(s > -1.0 / 8);
  CHECK(s == doctest::Approx(-std::atan(std::tanh(1.0)) / (2 * kPi)));
}

TEST_CASE("winding derivative from the radius") {
  CHECK(winding_derivative(CoeffPath::constant(0, 0, 0, 1.0), 0.3) == doctest::Approx(0.0));
  CHECK(std::abs(winding_derivative(CoeffPath::constant(1, 0, 1, 1.0), 0.3)) < 1e-11);
  const double r2 = std::cosh(1.0) * std::cosh(1.0) + std::sinh(1.0) * std::sinh(1.0);
  CHECK(winding_derivative(CoeffPath::constant(-1, 0, 1, 1.0), 0.0) ==
        doctest::Approx((1.0 / r2 - 1.0) / (2 * kPi)).epsilon(1e-10));
}

TEST_CASE("d theta / d omega equals 1 / r^2") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> W(0.0, 2 * kPi);
  for (int n = 0; n < 20; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const double w = W(rng), h = 1e-5;
    const double d = (angle_lift(S, w + h, S.T).theta_end - angle_lift(S, w - h, S.T).theta_end) / (2 * h);
    const double r = angle_lift(S, w, S.T).r_end();
    CHECK(std::abs(d - 1.0 / (r * r)) < 1e-4);
  }
}

TEST_CASE("eta has period pi and theta shifts by pi") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> W(0.0, kPi);
  for (int n = 0; n < 10; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const double w = W(rng);
    CHECK(std::abs(winding(S, 1, w + kPi) - winding(S, 1, w)) < 1e-8);
    const AngularSolution a = angle_lift(S, w, S.T), b = angle_lift(S, w + kPi, S.T);
    for (double t : {0.3, 2.0, S.T}) CHECK(std::abs(b.theta(t) - a.theta(t) - kPi) < 1e-8);
  }
}

TEST_CASE("angle flow semigroup over one period") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 5; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const double w = 0.9;
    const AngularSolution two = angle_lift(S, w, 2 * S.T);
    const double thT = two.theta(S.T);
    const AngularSolution again = angle_lift(S, thT, S.T);
    for (double t : {0.0, 0.8, 3.1, S.T}) CHECK(std::abs(two.theta(t + S.T) - again.theta(t)) < 1e-7);
  }
}

TEST_CASE("integration errors surface as ToleranceNotMet") {
  CHECK_THROWS_AS(integrate_fundamental(CoeffPath::constant(1, 0, 1, 1.0), 1.0, 0.0), Error);
}
