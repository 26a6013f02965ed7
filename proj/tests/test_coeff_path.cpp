#include <doctest.h>

#include <cmath>

#include "hamrot/coeff_path.hpp"
#include "hamrot/errors.hpp"
#include "support/oracle.hpp"

using namespace hamrot;
using oracle::kPi;

TEST_CASE("trig polynomial evaluation") {
  const double T = 3.0;
  const PeriodicFunction f = PeriodicFunction::trig(T, {0.5, 1.0, -0.25}, {0.0, 0.3, 0.7});
  for (double t : {0.0, 0.4, 1.3, 2.9, -5.1, 17.2}) {
    const double w = 2 * kPi / T;
    const double expected = 0.5 + std::cos(w * t) - 0.25 * std::cos(2 * w * t) + 0.3 * std::sin(w * t) +
                            0.7 * std::sin(2 * w * t);
    CHECK(f(t) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(f(t + T) == doctest::Approx(f(t)).epsilon(1e-12));
  }
}

TEST_CASE("trig derivative is exact") {
  const double T = 2 * kPi;
  const PeriodicFunction f = PeriodicFunction::trig(T, {1.0, 2.0, 0.0, 0.5}, {0.0, -1.0, 0.25});
  for (double t : {0.0, 0.7, 2.2, 5.9}) {
    const double expected = -2.0 * std::sin(t) - 1.0 * std::cos(t) + 0.5 * std::cos(2 * t) - 1.5 * std::sin(3 * t);
    CHECK(f.derivative(t) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("sampled tables interpolate periodically") {
  const double T = 2.0;
  const int n = 256;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = std::sin(2 * kPi * i / n) + 0.5;
  const PeriodicFunction f = PeriodicFunction::sampled(T, s);
  CHECK(f(0.0) == doctest::Approx(0.5));
  for (double t : {0.013, 0.77, 1.5, 1.999, 2.3, -0.4}) {
    CHECK(std::abs(f(t) - (std::sin(kPi * t) + 0.5)) < 1e-6);
    CHECK(std::abs(f.derivative(t) - kPi * std::cos(kPi * t)) < 1e-3);
    CHECK(f(t + T) == doctest::Approx(f(t)).epsilon(1e-12));
  }
  // Node values are reproduced exactly.
  CHECK(f(T * 37 / n) == doctest::Approx(s[37]).epsilon(1e-14));
}

TEST_CASE("sampled tables need enough nodes") {
  CHECK_THROWS_AS(PeriodicFunction::sampled(1.0, {1.0, 2.0}), Error);
}

TEST_CASE("constants, shifts and scalings") {
  const PeriodicFunction c = PeriodicFunction::constant(2.5);
  CHECK(c.is_constant());
  CHECK(c(123.4) == 2.5);
  const PeriodicFunction f = PeriodicFunction::trig(1.0, {1.0, 1.0});
  CHECK_FALSE(f.is_constant());
  CHECK(f.shifted(2.0)(0.25) == doctest::Approx(3.0));
  CHECK(f.scaled(3.0)(0.0) == doctest::Approx(6.0));
  CHECK(f.sup_bound() >= 2.0);
}

TEST_CASE("coefficient path matrix") {
  const CoeffPath S = CoeffPath::constant(1.0, 0.5, 2.0, 2 * kPi);
  const Mat2 m = S.S(0.3);
  CHECK(m.m11 == 1.0);
  CHECK(m.m12 == 0.5);
  CHECK(m.m21 == 0.5);
  CHECK(m.m22 == 2.0);
  CHECK(S.a.period() == doctest::Approx(2 * kPi));

  const CoeffPath P(2.0, PeriodicFunction::trig(2.0, {0.0, 1.0}), PeriodicFunction::constant(0.0),
                    PeriodicFunction::trig(2.0, {1.0}, {0.0, 0.5}));
  for (double t : {0.1, 0.9, 1.7}) {
    double a, b, c;
    P.eval(t, a, b, c);
    CHECK(a == doctest::Approx(std::cos(kPi * t)));
    CHECK(b == 0.0);
    CHECK(c == doctest::Approx(1.0 + 0.5 * std::sin(kPi * t)));
    CHECK(P.a(t + 2.0) == doctest::Approx(P.a(t)).epsilon(1e-12));
  }
}
