#include <doctest.h>

#include <cmath>
#include <random>

#include "hamrot/errors.hpp"
#include "hamrot/index_theory.hpp"
#include "support/battery.hpp"
#include "support/oracle.hpp"

using namespace hamrot;
using oracle::kPi;

namespace {

CoeffPath zero_system(double T = 1.0) { return CoeffPath::constant(0, 0, 0, T); }
CoeffPath identity_system(double T) { return CoeffPath::constant(1, 0, 1, T); }
CoeffPath saddle(double T = 1.0) { return CoeffPath::constant(-1, 0, 1, T); }

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

bool near_half_integer(double x, double band) { return std::abs(2 * x - std::round(2 * x)) < 2 * band; }

}  // namespace

TEST_CASE("winding extrema examples") {
  const WindingExtrema z = winding_extrema(zero_system());
  CHECK(z.eta_minus == doctest::Approx(0.0));
  CHECK(z.eta_plus == doctest::Approx(0.0));

  const WindingExtrema r = winding_extrema(identity_system(kPi / 2));
  CHECK(r.eta_minus == doctest::Approx(0.25).epsilon(1e-11));
  CHECK(r.eta_plus == doctest::Approx(0.25).epsilon(1e-11));

  // Saddle: compare with a dense omega grid of the closed-form flow.
  const WindingExtrema s = winding_extrema(saddle());
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 3142; ++i) {
    const double eta = oracle::rk4_winding(saddle(), i * 1e-3, 1, 2000);
    lo = std::min(lo, eta);
    hi = std::max(hi, eta);
  }
  CHECK(s.eta_minus < 0.0);
  CHECK(s.eta_plus > 0.0);
  CHECK(s.eta_minus > -0.5);
  CHECK(s.eta_plus < 0.5);
  CHECK(s.eta_minus <= lo + 1e-9);
  CHECK(s.eta_plus >= hi - 1e-9);
  CHECK(std::abs(s.eta_minus - lo) < 1e-6);
  CHECK(std::abs(s.eta_plus - hi) < 1e-6);
  CHECK(winding(saddle(), 1, 0.0) < 0.0);
  CHECK(winding(saddle(), 1, kPi / 2) > 0.0);
}

TEST_CASE("extrema bound every sampled winding on random systems") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> W(0.0, kPi);
  for (int n = 0; n < 5; ++n) {
    const CoeffPath S = oracle::random_system(rng);
    const WindingExtrema e = winding_extrema(S);
    for (int i = 0; i < 50; ++i) {
      const double eta = winding(S, 1, W(rng));
      CHECK(eta >= e.eta_minus - 1e-10);
      CHECK(eta <= e.eta_plus + 1e-10);
    }
  }
}

TEST_CASE("classify examples") {
  const ClassLabel z = classify(zero_system());
  CHECK(z.case_id == 1);
  CHECK(z.name() == "p*r");
  CHECK(z.ell == 0);

  const ClassLabel s = classify(saddle());
  CHECK(s.case_id == 1);
  CHECK(s.name() == "h");
  CHECK(s.ell == 0);

  const ClassLabel e = classify(identity_system(kPi / 2));
  CHECK(e.case_id == 2);
  CHECK(e.name() == "e-");
  CHECK(e.ell == 0);
}

TEST_CASE("constant-coefficient oracle battery") {
  for (double T : {kPi / 5, kPi / 2, 2 * kPi / 3, kPi, 2 * kPi, 5 * kPi / 2, 3 * kPi}) {
    CAPTURE(T);
    const oracle::RotationOracle o = oracle::identity_oracle(T);
    const IndexReport r = index_report(identity_system(T));
    CHECK(r.label.case_id == o.case_id);
    CHECK(r.label.name() == o.tag);
    CHECK(r.label.ell == o.ell);
    CHECK(r.i_T == o.i_T);
    CHECK(r.rho_interval.contains(o.rho));
    CHECK(r.rho_interval.width() <= 0.01 + 1e-12);
    CHECK(std::abs(r.m - 2 * o.rho) <= r.rho_interval.width() + 1e-9);
    CHECK(std::string(to_string(r.stability)) == o.stability);
  }
  for (double T : {0.5, 1.0, 3.0}) {
    CAPTURE(T);
    const IndexReport r = index_report(saddle(T));
    const Mat2 M = oracle::const_flow(-1, 0, 1, T);
    CHECK(M.trace() > 2.0);
    CHECK(r.label.name() == "h");
    CHECK(r.label.ell == 0);
    CHECK(r.i_T == 0);
    CHECK(r.rho_interval.lo == 0.0);
    CHECK(r.rho_interval.hi == 0.0);
    CHECK(r.m == 0.0);
    CHECK(r.stability == Stability::unstable);
  }
}

TEST_CASE("cz index examples") {
  CHECK(cz_index(zero_system()) == 0);
  CHECK(cz_index(identity_system(kPi / 2)) == 1);
  CHECK(cz_index(identity_system(5 * kPi / 2)) == 3);
  CHECK(cz_index(identity_system(2 * kPi)) == 2);
  CHECK(cz_index(saddle()) == 0);
}

TEST_CASE("cz index via the polar lift") {
  CHECK(cz_index_via_polar(saddle(), 1) == 0);
  CHECK(cz_index_via_polar(identity_system(kPi / 2), 1) == 1);
  CHECK(cz_index_via_polar(identity_system(3 * kPi), 1) == 3);
  CHECK(cz_index_via_polar(identity_system(5 * kPi / 2), 1) == 3);
  CHECK(error_of([] { (void)cz_index_via_polar(zero_system(), 1); }) == ErrorKind::ResonantInput);
  CHECK(error_of([] { (void)cz_index_via_polar(identity_system(2 * kPi), 1); }) == ErrorKind::ResonantInput);
}

TEST_CASE("rotation number examples") {
  const Interval z = rotation_number(zero_system(), 10);
  CHECK(z.lo == 0.0);
  CHECK(z.hi == 0.0);
  const Interval r = rotation_number(identity_system(1.0), 100);
  CHECK(r.contains(1 / (2 * kPi)));
  CHECK(r.width() <= 0.02 + 1e-12);
  for (int K : {1, 7, 200}) {
    const Interval s = rotation_number(saddle(), K);
    CHECK(s.lo == 0.0);
    CHECK(s.hi == 0.0);
  }
}

TEST_CASE("mean index examples") {
  CHECK(mean_index(zero_system()) == 0.0);
  CHECK(std::abs(mean_index(identity_system(2 * kPi / 3)) - 2.0 / 3) <= 2.0 / 200);
  CHECK(mean_index(saddle()) == 0.0);
}

TEST_CASE("iteration examples") {
  const IterationReport s = iterate_index(saddle(), 7);
  CHECK(s.i_kT == 0);
  CHECK(s.predicted_label.name() == "h");

  const IterationReport p = iterate_index(identity_system(kPi), 2);
  CHECK(p.i_kT == 2);
  CHECK(p.predicted_label.name() == "p*r");
  CHECK(p.predicted_label.ell == 1);

  const IterationReport e = iterate_index(identity_system(2 * kPi / 3), 3);
  CHECK(e.p == 2);
  CHECK(e.q == 3);
  CHECK(e.predicted_class == MultiplierClass::parabolic_plus);
  CHECK(multipliers(monodromy(identity_system(2 * kPi / 3), 2 * kPi)).cls == MultiplierClass::parabolic_plus);
}

TEST_CASE("elliptic iteration bounds on rotations") {
  for (double T : {kPi / 5, kPi / 2, 2 * kPi / 3, 0.9, 5 * kPi / 2}) {
    const long ell = oracle::identity_oracle(T).ell;
    for (int k = 1; k <= 30; ++k) {
      CAPTURE(T);
      CAPTURE(k);
      const IterationReport r = iterate_index(identity_system(T), k);
      CHECK(r.i_kT == oracle::identity_oracle(k * T).i_T);
      CHECK(2 * k * ell + 1 <= r.i_kT);
      CHECK(r.i_kT <= 2 * k * ell + k);
    }
  }
}

TEST_CASE("rational approximation") {
  const auto r = rational_approx(2.0 / 3);
  REQUIRE(r);
  CHECK(r->first == 2);
  CHECK(r->second == 3);
  CHECK_FALSE(rational_approx(std::sqrt(2.0)));
  CHECK_FALSE(rational_approx(1.0 / 67));
}

TEST_CASE("stability examples") {
  CHECK(stability(zero_system()) == Stability::stable);
  CHECK(stability(saddle()) == Stability::unstable);
  CHECK(stability(identity_system(kPi / 2)) == Stability::strongly_stable);
  CHECK(stability_via_second_iterate(identity_system(kPi / 5)) == Stability::stable);
  CHECK(stability_via_second_iterate(saddle()) == Stability::unstable);
  CHECK(stability_via_second_iterate(identity_system(2 * kPi / 3)) == Stability::stable);
  CHECK(error_of([] { (void)stability_via_second_iterate(identity_system(kPi)); }) == ErrorKind::ResonantInput);
}

TEST_CASE("rotation versus winding examples") {
  CHECK(rotation_vs_winding(zero_system(), 3, 1) == Trichotomy::less);
  CHECK(rotation_vs_winding(identity_system(2 * kPi), 2, 2) == Trichotomy::equal);
  CHECK(rotation_vs_winding(identity_system(2 * kPi), 3, 2) == Trichotomy::greater);
}

TEST_CASE("rotation versus winding decision rule") {
  CHECK(decide_rotation_vs_winding(0.2, 0.9, 1, 2) == Trichotomy::less);
  CHECK(decide_rotation_vs_winding(0.2, 1.3, 1, 2) == Trichotomy::equal);
  CHECK(decide_rotation_vs_winding(1.2, 1.3, 1, 2) == Trichotomy::greater);
  CHECK(error_of([] { (void)decide_rotation_vs_winding(0.2, 0.9, 1, 2, Interval{0.7, 0.8}); }) ==
        ErrorKind::InconsistentClassification);
  CHECK(error_of([] { (void)decide_rotation_vs_winding(0.2, 1.0 - 5e-8, 1, 2, Interval{0.45, 0.55}); }) ==
        ErrorKind::Undecidable);
}

TEST_CASE("battery: dual index methods and parity") {
  const auto& members = oracle::battery();
  CHECK(members.size() >= 45);
  int compared = 0;
  for (const auto& m : members) {
    const Mat2 M = monodromy(m.S, m.S.T);
    const Stratum st = lambda_stratum(M);
    if (st == Stratum::zero) continue;
    CHECK(cz_index_via_polar(m.S, 1) == m.report.i_T);
    CHECK((m.report.i_T % 2 == 0) == (st == Stratum::minus));
    ++compared;
  }
  CHECK(compared == static_cast<int>(members.size()));
}

TEST_CASE("battery: label invariants") {
  for (const auto& m : oracle::battery()) {
    const IndexReport& r = m.report;
    CHECK(r.eta_minus <= r.eta_plus);
    CHECK((r.i_T % 2 == 0) == (r.label.case_id == 1));
    CHECK(std::abs(r.m / 2 - r.rho_interval.mid()) <= r.rho_interval.width() + 1e-12);
    if (r.label.case_id == 1) {
      CHECK(r.label.ell - 0.5 < r.eta_minus);
      CHECK(r.eta_minus <= r.label.ell + 1e-9);
      CHECK(r.label.ell - 1e-9 <= r.eta_plus);
      CHECK(r.eta_plus < r.label.ell + 0.5);
    } else {
      CHECK(r.label.ell < r.eta_minus);
      CHECK(r.eta_plus < r.label.ell + 1);
    }
  }
}

TEST_CASE("battery: m = 2 rho") {
  for (const auto& m : oracle::battery()) {
    const double mi = mean_index(m.S);
    const Interval rho = rotation_number(m.S);
    CHECK(std::abs(mi - 2 * rho.mid()) <= rho.width() + 1e-6);
    // Independent slope from a direct index of a long iterate.
    const double slope = static_cast<double>(direct_index(m.S, 800)) / 800.0;
    CHECK(std::abs(slope - 2 * rho.mid()) <= rho.width() + 2.0 / 800 + 1e-6);
  }
}

TEST_CASE("battery: winding of iterates stays between k eta-") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> W(0.0, kPi);
  const auto& members = oracle::battery();
  for (std::size_t i = 0; i < 10 && i < members.size(); ++i) {
    const auto& m = members[i];
    for (int s = 0; s < 20; ++s) {
      const double w = W(rng);
      const double eta1 = winding(m.S, 1, w);
      for (int k = 2; k <= 10; ++k) {
        const double eta = winding(m.S, k, w);
        CHECK(k * m.report.eta_minus - 1e-6 <= eta);
        CHECK(eta <= k * m.report.eta_plus + 1e-6);
        if (near_half_integer(eta1, 1e-9)) CHECK(std::abs(eta - k * std::round(2 * eta1) / 2) < 1e-6);
      }
    }
  }
}

TEST_CASE("winding pinned on Z/2 stays pinned under iteration") {
  // Along an eigendirection of a hyperbolic monodromy eta_T hits Z/2. The
  // check runs on the expanding eigendirection (eta decreasing, r > 1);
  // on the contracting one an angle error grows like |mu|^{2k} per period.
  int checked = 0;
  for (const auto& m : oracle::battery()) {
    if (m.report.label.name() != "h") continue;
    const WindingExtrema e = winding_extrema(m.S);
    const double l = m.report.label.case_id == 1 ? static_cast<double>(m.report.label.ell)
                                                 : m.report.label.ell + 0.5;
    double a = e.argmax, b = e.argmin;
    if (b < a) b += kPi;
    for (int it = 0; it < 200; ++it) {
      const double c = 0.5 * (a + b);
      (winding(m.S, 1, c) > l ? a : b) = c;
    }
    const double w = 0.5 * (a + b);
    REQUIRE(std::abs(winding(m.S, 1, w) - l) < 1e-9);
    CHECK(winding_derivative(m.S, w) <= 0.0);
    for (int k = 2; k <= 10; ++k) CHECK(std::abs(winding(m.S, k, w) - k * l) < 1e-6);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("battery: iteration formulas match direct classification") {
  int checked = 0;
  for (const auto& m : oracle::battery()) {
    if (m.report.label.elliptic()) continue;
    for (int k = 1; k <= 8; ++k) {
      const IterationReport r = iterate_index(m.S, k);
      const ClassLabel direct = classify(m.S, k);
      CHECK(r.from_formula);
      CHECK(r.i_kT == index_of(direct));
      CHECK(r.predicted_label == direct);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("battery: stability agrees with the rotation interval") {
  for (const auto& m : oracle::battery()) {
    const Interval& rho = m.report.rho_interval;
    const Mat2 M = monodromy(m.S, m.S.T);
    const Mat2 M2 = monodromy(m.S, 2 * m.S.T);
    if (lambda_stratum(M) == Stratum::zero || lambda_stratum(M2) == Stratum::zero) continue;
    bool contains_half = false, disjoint = true;
    for (long n = static_cast<long>(std::floor(2 * rho.lo)) - 1; n <= static_cast<long>(std::ceil(2 * rho.hi)) + 1; ++n) {
      if (rho.contains(0.5 * n)) {
        contains_half = true;
        disjoint = false;
      }
    }
    if (!(disjoint || rho.pinned())) continue;
    const bool stable = m.report.stability != Stability::unstable;
    CHECK(stable == !contains_half);
    CHECK((stability_via_second_iterate(m.S) == Stability::stable) == stable);
  }
}

TEST_CASE("battery: rotation versus winding agrees with the rotation interval") {
  const auto& members = oracle::battery();
  int compared = 0;
  for (std::size_t i = 0; i < 10 && i < members.size(); ++i) {
    const auto& m = members[i];
    const Interval& rho = m.report.rho_interval;
    for (int k = 1; k <= 3; ++k) {
      const WindingExtrema e = winding_extrema(m.S, 256, 1e-10, k);
      for (long j = -6; j <= 6; ++j) {
        const double x = static_cast<double>(j) / k;
        Trichotomy t;
        try {
          t = decide_rotation_vs_winding(e.eta_minus, e.eta_plus, j, k);
        } catch (const Error& err) {
          CHECK(err.kind() == ErrorKind::Undecidable);
          CHECK(rho.contains(x));
          continue;
        }
        if (rho.contains(x)) continue;
        CHECK(t == (x < rho.lo ? Trichotomy::greater : Trichotomy::less));
        ++compared;
      }
    }
  }
  CHECK(compared > 0);
}
