#include <doctest.h>

#include <cmath>
#include <random>

#include "hamrot/catalog.hpp"
#include "hamrot/errors.hpp"
#include "hamrot/subharmonics.hpp"
#include "support/oracle.hpp"

using namespace hamrot;
using oracle::kPi;

namespace {

template <class F>
ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

double dist(const Mat2& a, const Mat2& b) { return (a - b).norm(); }

// Linear part z' = -J S0(t) z of the field.
Vec2 linear_part(const CoeffPath& S, double t, const Vec2& z) {
  double a, b, c;
  S.eval(t, a, b, c);
  return {b * z[0] + c * z[1], -a * z[0] - b * z[1]};
}

}  // namespace

TEST_CASE("number parsing") {
  CHECK(parse_number("1.5") == 1.5);
  CHECK(parse_number("-2e-3") == -2e-3);
  CHECK(parse_number("pi") == doctest::Approx(kPi));
  CHECK(parse_number("2pi") == doctest::Approx(2 * kPi));
  CHECK(parse_number("2*pi") == doctest::Approx(2 * kPi));
  CHECK(parse_number("pi/2") == doctest::Approx(kPi / 2));
  CHECK(parse_number("5*pi/2") == doctest::Approx(5 * kPi / 2));
  CHECK(parse_number("-pi/5") == doctest::Approx(-kPi / 5));
  CHECK(parse_number("2\xcf\x80") == doctest::Approx(2 * kPi));
  CHECK(parse_number("1/4") == 0.25);
  CHECK_THROWS_AS(parse_number("abc"), Error);
  CHECK_THROWS_AS(parse_number(""), Error);
  CHECK_THROWS_AS(parse_number("1/0"), Error);
}

TEST_CASE("system spec parsing") {
  const SystemSpec s = parse_system_spec("hill q=4, T=2pi");
  CHECK(s.name == "hill");
  CHECK(s.params.at("q") == 4.0);
  CHECK(s.params.at("T") == doctest::Approx(2 * kPi));
  CHECK(parse_system_spec("saddle").params.empty());
  CHECK_THROWS_AS(parse_system_spec("hill q"), Error);
  CHECK_THROWS_AS(parse_system_spec("hill q=1 q=2"), Error);
  CHECK(error_of([] { (void)build_system("nope"); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { (void)build_system("hill z=1"); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { (void)build_system("hill T=-1"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("every catalog entry builds with its defaults") {
  for (const auto& e : catalog_entries()) {
    CAPTURE(e.name);
    const BuiltSystem b = build_system(e.name);
    CHECK(b.kind == e.kind);
    CHECK(b.nonlinear.has_value() == (e.kind == SystemKind::nonlinear));
    CHECK(b.params.size() == e.defaults.size());
    CHECK(b.linear.T == doctest::Approx(b.params.at("T")));
  }
}

TEST_CASE("Hill constructor") {
  const CoeffPath z = make_hill(PeriodicFunction::constant(0.0), 2 * kPi);
  CHECK(z.a(1.0) == 0.0);
  CHECK(z.b(1.0) == 0.0);
  CHECK(z.c(1.0) == 1.0);
  const double w = 1.3, T = 2.0;
  const MultiplierPair mp = multipliers(monodromy(make_hill(PeriodicFunction::constant(w * w), T), T));
  CHECK(mp.cls == MultiplierClass::elliptic);
  CHECK(std::abs(mp.mu1 - std::polar(1.0, w * T)) < 1e-9);
  // Mathieu at (delta, eps) = (1/4, 0): boundary of the first tongue.
  const BuiltSystem m = build_system("mathieu delta=0.25 eps=0");
  const Mat2 M = monodromy(m.linear, m.linear.T);
  CHECK(dist(M, oracle::rk4_flow(m.linear, 0.0, m.linear.T)) < 1e-8);
  CHECK(multipliers(M).cls == MultiplierClass::parabolic_minus);
  const BuiltSystem me = build_system("mathieu delta=0.25 eps=0.3");
  CHECK(dist(monodromy(me.linear, me.linear.T), oracle::rk4_flow(me.linear, 0.0, me.linear.T)) < 1e-8);
  CHECK(multipliers(monodromy(me.linear, me.linear.T)).cls == MultiplierClass::hyperbolic);
}

TEST_CASE("Lotka-Volterra constructor") {
  const LotkaVolterraSystem one =
      make_lotka_volterra_log(PeriodicFunction::constant(1.0), PeriodicFunction::constant(1.0), 2 * kPi);
  CHECK(one.rho0.lo == 1.0);
  CHECK(one.rho0.hi == 1.0);
  // S0 is u'' + u = 0 in first-order form.
  for (double t : {0.5, 2.0}) CHECK(dist(one.system.S0.S(t), Mat2::identity()) == 0.0);

  const PeriodicFunction g = PeriodicFunction::trig(2 * kPi, {1.0, 0.5});
  const LotkaVolterraSystem lv = make_lotka_volterra_log(g, g, 2 * kPi);
  CHECK(lv.rho0.lo > 0.0);
  CHECK(lv.system.sublinear_at_infinity);
  CHECK(error_of([&] { (void)make_lotka_volterra_log(PeriodicFunction::constant(0.0), g, 2 * kPi); }) ==
        ErrorKind::InvalidArgument);
  CHECK(error_of([&] {
          (void)make_lotka_volterra_log(PeriodicFunction::trig(2 * kPi, {0.0, 1.0}), g, 2 * kPi);
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("saturating constructor") {
  const PlanarSystem s9 = make_saturating_scalar(PeriodicFunction::constant(9.0), 2 * kPi);
  const Interval r = rotation_at_zero(s9);
  CHECK(r.lo == 3.0);
  CHECK(r.hi == 3.0);
  CHECK(rotation_at_infinity(s9).hi == 0.0);
  const Interval rm = rotation_at_zero(*build_system("saturating q0=9 amp=0.3").nonlinear);
  CHECK(rm.lo > 2.9);
  CHECK(rm.hi < 3.1);
  const PlanarSystem s0 = make_saturating_scalar(PeriodicFunction::constant(0.0), 2 * kPi);
  CHECK(error_of([&] { (void)rotation_gap(rotation_at_zero(s0), rotation_at_infinity(s0)); }) ==
        ErrorKind::GapUncertified);
}

TEST_CASE("Minkowski constructor") {
  ScalarNonlinearity lin{[](double, double u) { return u; }, [](double, double) { return 1.0; }};
  const PlanarSystem id = make_minkowski(lin, 1.0, PeriodicFunction::constant(0.0), 2 * kPi);
  for (double t : {0.1, 3.0}) CHECK(dist(id.S0.S(t), Mat2::identity()) < 1e-15);
  REQUIRE(id.Sinf);
  CHECK(id.Sinf->a(1.0) == 0.0);

  ScalarNonlinearity sat{[](double, double u) { return 4 * u / (1 + u * u); },
                         [](double, double u) { return 4 * (1 - u * u) / ((1 + u * u) * (1 + u * u)); }};
  const PlanarSystem m4 = make_minkowski(sat, 1.0, PeriodicFunction::constant(0.0), 2 * kPi);
  const Interval r = rotation_at_zero(m4);
  CHECK(r.lo == 2.0);
  CHECK(r.hi == 2.0);

  // A non-trivial ubar = e sin t solves the equation with f(t, u) = u - g(t)
  // for g = (phi(ubar'))' + ubar.
  const double e = 0.4;
  auto g = [e](double t) {
    const double up = e * std::cos(t), upp = -e * std::sin(t);
    return std::pow(1 - up * up, -1.5) * upp + e * std::sin(t);
  };
  ScalarNonlinearity forced{[g](double t, double u) { return u - g(t); }, [](double, double) { return 1.0; }};
  const PeriodicFunction ubar = PeriodicFunction::trig(2 * kPi, {0.0}, {0.0, e});
  const PlanarSystem mf = make_minkowski(forced, 1.0, ubar, 2 * kPi);
  for (double t : {0.0, 1.0, 2.5}) {
    const Vec2 f0 = mf.field(t, {0.0, 0.0});
    CHECK(std::abs(f0[0]) < 1e-15);
    CHECK(std::abs(f0[1]) < 1e-15);
    CHECK(mf.S0.c(t) == doctest::Approx(std::pow(1 - e * e * std::cos(t) * std::cos(t), 1.5)).epsilon(1e-6));
  }
  CHECK(error_of([&] {
          (void)make_minkowski(forced, 1.0, PeriodicFunction::trig(2 * kPi, {0.0}, {0.0, 0.3}), 2 * kPi);
        }) == ErrorKind::NotASolution);
  CHECK(error_of([&] { (void)make_minkowski(lin, 1.0, PeriodicFunction::constant(0.5), 2 * kPi); }) ==
        ErrorKind::NotASolution);
  CHECK(error_of([&] { (void)make_minkowski(lin, -1.0, PeriodicFunction::constant(0.0), 2 * kPi); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("Minkowski phi and its inverse") {
  for (double a : {0.5, 1.0, 3.0})
    for (double s : {-0.4, 0.0, 0.2, 0.49}) CHECK(minkowski_phi_inverse(minkowski_phi(s, a), a) == doctest::Approx(s));
  CHECK(std::abs(minkowski_phi_inverse(1e4, 1.0)) < 1.0);
}

TEST_CASE("nonlinear entries vanish at the origin and linearize to S0") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& e : catalog_entries()) {
    if (e.kind != SystemKind::nonlinear) continue;
    CAPTURE(e.name);
    const PlanarSystem sys = *build_system(e.name).nonlinear;
    for (int i = 0; i < 100; ++i) {
      const double t = U(rng) * sys.T;
      const Vec2 f = sys.field(t, {0.0, 0.0});
      CHECK(std::hypot(f[0], f[1]) <= 1e-12);
      CHECK(std::hypot(sys.field(t + sys.T, {0.3, -0.2})[0] - sys.field(t, {0.3, -0.2})[0],
                       sys.field(t + sys.T, {0.3, -0.2})[1] - sys.field(t, {0.3, -0.2})[1]) < 1e-12);
    }
    // Relative linearization error on circles of radius 1e-3 ... 1e-6
    // decays at least linearly in the radius.
    std::vector<double> err;
    for (double r : {1e-3, 1e-4, 1e-5, 1e-6}) {
      double worst = 0.0;
      for (int i = 0; i < 64; ++i) {
        const double th = 2 * kPi * i / 64, t = sys.T * i / 64;
        const Vec2 z{r * std::cos(th), r * std::sin(th)};
        const Vec2 f = sys.field(t, z), l = linear_part(sys.S0, t, z);
        worst = std::max(worst, std::hypot(f[0] - l[0], f[1] - l[1]) / r);
      }
      err.push_back(worst);
    }
    for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i] <= 3.0 * err[i - 1] / 10.0 + 1e-15);
  }
}

TEST_CASE("Minkowski trajectories keep |x'| below a") {
  const PlanarSystem mk = *build_system("minkowski").nonlinear;
  for (const Vec2 z0 : {Vec2{0.5, 0.3}, Vec2{3.0, -2.0}, Vec2{20.0, 40.0}}) {
    for (const auto& s : sample_orbit(mk, 2, z0)) CHECK(std::abs(mk.field(s.t, {s.x, s.y})[0]) < 1.0 - 1e-9);
  }
}
