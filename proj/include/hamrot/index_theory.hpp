#pragma once

#include <optional>
#include <string>

#include "hamrot/coeff_path.hpp"
#include "hamrot/linear_flow.hpp"
#include "hamrot/sp1.hpp"

namespace hamrot {

// Labels of the two classification tables. In case 1 the parabolic tags
// carry an "r" subscript when printed (T-resonant rows).
enum class Tag { h, p_minus, p_plus, p_star, e_minus, e_plus };

struct ClassLabel {
  int case_id = 1;  // 1: i_T even, 2: i_T odd
  Tag tag = Tag::p_star;
  long ell = 0;

  std::string name() const;  // e.g. "p*r", "e-"
  bool elliptic() const { return tag == Tag::e_minus || tag == Tag::e_plus; }
  bool operator==(const ClassLabel&) const = default;
};

enum class Stability { unstable, stable, strongly_stable };
enum class Trichotomy { less, equal, greater };

const char* to_string(Stability s);
const char* to_string(Trichotomy t);

struct Interval {
  double lo = 0.0, hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool pinned() const { return lo == hi; }
};

struct WindingExtrema {
  double eta_minus = 0.0, eta_plus = 0.0;
  double argmin = 0.0, argmax = 0.0;
};

struct IndexOptions {
  double tol = kDefaultTol;   // integration tolerance
  int grid_n = 256;           // omega grid on [0, pi)
  double refine_tol = 1e-10;  // omega resolution of the critical-point search
};

// Width of the band in which an eta value snaps onto Z/2.
inline constexpr double kSnapBand = 1e-9;
// Values this close to Z/2 (but not snapped) count as near-degenerate.
inline constexpr double kNearBand = 1e-6;

// Extrema of eta_{kT} over [0, pi).
WindingExtrema winding_extrema(const CoeffPath& S, int grid_n = 256, double refine_tol = 1e-10, int k = 1,
                               double tol = kDefaultTol);

// Label implied by the winding extrema alone (no spectral check).
ClassLabel label_from_winding(double eta_minus, double eta_plus);
// 2 ell in case 1, 2 ell + 1 in case 2.
long index_of(const ClassLabel& label);
Stability stability_of(const ClassLabel& label);

// Joint winding/spectral classification of the path on [0, kT].
ClassLabel classify(const CoeffPath& S, int k = 1, const IndexOptions& opt = {});
long cz_index(const CoeffPath& S, int k = 1, const IndexOptions& opt = {});

// Conley-Zehnder index from the lifted polar angle of M(t) on [0, kT].
long cz_index_via_polar(const FundamentalPath& path);
long cz_index_via_polar(const CoeffPath& S, int k = 1, double tol = kDefaultTol);

Interval rotation_number(const CoeffPath& S, int K = 200, const IndexOptions& opt = {});

// i_{kT} by an independent route: closed formulas for hyperbolic/parabolic
// systems, the polar lift (or a direct classification at resonance) for
// elliptic ones.
long direct_index(const CoeffPath& S, int k, const IndexOptions& opt = {});
double mean_index(const CoeffPath& S, int K = 200, const IndexOptions& opt = {});

struct IterationReport {
  int k = 1;
  long i_kT = 0;
  long i_lo = 0, i_hi = 0;  // equal for hyperbolic/parabolic systems
  ClassLabel predicted_label;
  bool from_formula = true;
  // Elliptic systems: rational approximation p/q of phi/pi, q = 0 if none.
  long p = 0, q = 0;
  MultiplierClass predicted_class = MultiplierClass::elliptic;
};

// Closed-form index of the k-th iterate for hyperbolic/parabolic labels.
IterationReport iterate_label(const ClassLabel& label, int k);
IterationReport iterate_index(const CoeffPath& S, int k, const IndexOptions& opt = {});

// Best rational p/q (q <= max_den) with |x - p/q| <= tol, if any.
std::optional<std::pair<long, long>> rational_approx(double x, long max_den = 64, double tol = 1e-9);

Stability stability(const CoeffPath& S, const IndexOptions& opt = {});
Stability stability_via_second_iterate(const CoeffPath& S, const IndexOptions& opt = {});

// Decision from precomputed eta_{kT} extrema, cross-checked against a
// rotation interval when one is supplied and excludes j/k.
Trichotomy decide_rotation_vs_winding(double eta_minus, double eta_plus, long j, int k,
                                      const std::optional<Interval>& rho = std::nullopt);
// K_check = 0 skips the rotation-interval cross-check.
Trichotomy rotation_vs_winding(const CoeffPath& S, int k, long j, int K_check = 200,
                               const IndexOptions& opt = {});

struct IndexReport {
  double eta_minus = 0.0, eta_plus = 0.0;
  ClassLabel label;
  long i_T = 0;
  Interval rho_interval;
  double m = 0.0;
  double tau = 0.0;
  Stability stability = Stability::stable;
  MultiplierPair multipliers;
};

IndexReport index_report(const CoeffPath& S, int K = 200, const IndexOptions& opt = {});

}  // namespace hamrot
