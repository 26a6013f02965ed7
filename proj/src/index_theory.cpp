#include "hamrot/index_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hamrot/errors.hpp"

namespace hamrot {

namespace {

constexpr double kPi = std::numbers::pi;

double snap_half(double eta) {
  const double n = std::round(2.0 * eta);
  return std::abs(2.0 * eta - n) < 2.0 * kSnapBand ? 0.5 * n : eta;
}

// Distance to Z/2.
double half_distance(double eta) { return 0.5 * std::abs(2.0 * eta - std::round(2.0 * eta)); }

long floor_div2(long n) { return n >= 0 ? n / 2 : -((-n + 1) / 2); }

struct OmegaSample {
  double omega, eta, deta;
};

OmegaSample sample_eta(const CoeffPath& S, double omega, double t_end, double tol) {
  const AngularSolution a = angle_lift(S, omega, t_end, tol, false);
  return {omega, (a.theta_end - omega) / (2.0 * kPi), (std::exp(-2.0 * a.log_r_end) - 1.0) / (2.0 * kPi)};
}

// Directions in [0, pi) where |M u| = 1, u = (cos w, -sin w). These are the
// only critical points of eta, so they pin down its extrema exactly.
std::vector<double> critical_directions(const Mat2& M) {
  const Mat2 B = M.transpose() * M;
  const double a0 = 0.5 * (B.m11 + B.m22);
  const double d = 0.5 * (B.m11 - B.m22);
  if (!(a0 - 1.0 > 1e-15) || !std::isfinite(a0)) return {};
  const double phi = std::atan2(B.m12, d);
  const double s = std::sqrt((a0 - 1.0) / (a0 + 1.0));
  // acos(s) without cancellation when s is close to one.
  const double one_minus_s = 2.0 / ((a0 + 1.0) * (1.0 + s));
  const double acos_s = 2.0 * std::asin(std::sqrt(0.5 * one_minus_s));
  const double base = kPi - acos_s;  // acos(-s)
  std::vector<double> out;
  for (double sgn : {1.0, -1.0}) {
    double w = 0.5 * (sgn * base - phi);
    w = std::fmod(w, kPi);
    if (w < 0.0) w += kPi;
    out.push_back(w);
  }
  return out;
}

WindingExtrema extrema_impl(const CoeffPath& S, int grid_n, double refine_tol, int k, double tol,
                            const Mat2& M) {
  if (grid_n < 16) throw Error(ErrorKind::InvalidArgument, "grid_n must be at least 16");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const double t_end = k * S.T;
  std::vector<OmegaSample> pts;
  pts.reserve(grid_n + 8);
  for (int i = 0; i < grid_n; ++i) pts.push_back(sample_eta(S, kPi * i / grid_n, t_end, tol));
  const std::vector<double> crit = critical_directions(M);
  std::vector<char> analytic(pts.size(), 0);
  for (double w : crit) {
    pts.push_back(sample_eta(S, w, t_end, tol));
    analytic.push_back(1);
  }

  // Bisect on the sign of eta' in brackets not already closed by an
  // analytic critical point.
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pts[x].omega < pts[y].omega; });
  const double dz = 1e-9;
  std::vector<OmegaSample> extra;
  for (std::size_t n = 0; n < order.size(); ++n) {
    const std::size_t ia = order[n], ib = order[(n + 1) % order.size()];
    if (analytic[ia] || analytic[ib]) continue;
    const OmegaSample& a = pts[ia];
    const OmegaSample& b = pts[ib];
    if (!((a.deta > dz && b.deta < -dz) || (a.deta < -dz && b.deta > dz))) continue;
    double lo = a.omega, hi = b.omega;
    if (hi <= lo) hi += kPi;
    const bool rising = a.deta > 0.0;
    OmegaSample mid = a;
    while (hi - lo > refine_tol) {
      const double w = 0.5 * (lo + hi);
      mid = sample_eta(S, w, t_end, tol);
      if ((mid.deta > 0.0) == rising)
        lo = w;
      else
        hi = w;
    }
    extra.push_back(sample_eta(S, 0.5 * (lo + hi), t_end, tol));
  }
  pts.insert(pts.end(), extra.begin(), extra.end());

  WindingExtrema e;
  e.eta_minus = e.eta_plus = pts.front().eta;
  e.argmin = e.argmax = pts.front().omega;
  for (const auto& p : pts) {
    if (p.eta < e.eta_minus) {
      e.eta_minus = p.eta;
      e.argmin = p.omega;
    }
    if (p.eta > e.eta_plus) {
      e.eta_plus = p.eta;
      e.argmax = p.omega;
    }
  }
  e.argmin = std::fmod(e.argmin, kPi);
  e.argmax = std::fmod(e.argmax, kPi);
  return e;
}

struct Spectral {
  MultiplierClass cls;
  double trace;
  bool star;
  bool near;
};

Spectral spectral_of(const Mat2& M) {
  const Mat2 Mn = normalize_symplectic(M);
  const MultiplierPair mp = multipliers(Mn);
  Spectral s;
  s.cls = mp.cls;
  s.trace = Mn.trace();
  const double nb = kNearBand * (1.0 + std::abs(s.trace));
  s.near = std::abs(s.trace - 2.0) < nb || std::abs(s.trace + 2.0) < nb;
  s.star = false;
  if (mp.cls == MultiplierClass::parabolic_plus || mp.cls == MultiplierClass::parabolic_minus) {
    const double sign = mp.cls == MultiplierClass::parabolic_plus ? 1.0 : -1.0;
    s.star = (Mn - sign * Mat2::identity()).norm() <= 1e-6 * (1.0 + Mn.norm());
  }
  return s;
}

bool consistent(const Spectral& s, const ClassLabel& w) {
  const bool parabolic_tag = w.tag == Tag::p_minus || w.tag == Tag::p_plus || w.tag == Tag::p_star;
  switch (s.cls) {
    case MultiplierClass::hyperbolic:
      return w.tag == Tag::h && w.case_id == (s.trace > 0.0 ? 1 : 2);
    case MultiplierClass::parabolic_plus:
      return w.case_id == 1 && parabolic_tag && ((w.tag == Tag::p_star) == s.star);
    case MultiplierClass::parabolic_minus:
      return w.case_id == 2 && parabolic_tag && ((w.tag == Tag::p_star) == s.star);
    case MultiplierClass::elliptic:
      return w.elliptic();
  }
  return false;
}

bool winding_near(double em, double ep) {
  for (double v : {em, ep}) {
    const double d = half_distance(v);
    if (d >= kSnapBand && d < kNearBand) return true;
  }
  return false;
}

ClassLabel classify_from(const WindingExtrema& e, const Mat2& M) {
  const Spectral s = spectral_of(M);
  const bool near = s.near || winding_near(e.eta_minus, e.eta_plus);
  ClassLabel w;
  try {
    w = label_from_winding(e.eta_minus, e.eta_plus);
  } catch (const Error&) {
    if (near) throw Error(ErrorKind::NearDegenerate, "winding range straddles Z/2 within the near band");
    throw;
  }
  if (consistent(s, w)) return w;
  std::ostringstream os;
  os.precision(12);
  os << "winding label " << w.name() << " (eta in [" << e.eta_minus << ", " << e.eta_plus
     << "]) vs spectral class " << to_string(s.cls) << " (tr = " << s.trace << ")";
  throw Error(near ? ErrorKind::NearDegenerate : ErrorKind::InconsistentClassification, os.str());
}

std::optional<double> pinned_half(const WindingExtrema& e) {
  const double n = std::ceil(2.0 * (e.eta_minus - kSnapBand));
  if (0.5 * n <= e.eta_plus + kSnapBand) return 0.5 * n + 0.0;
  return std::nullopt;
}

Interval rotation_from(const CoeffPath& S, const WindingExtrema& e, int K, double tol) {
  if (K < 1) throw Error(ErrorKind::InvalidArgument, "K must be positive");
  if (auto h = pinned_half(e)) return {*h, *h};
  const double eta = winding(S, K, 0.0, tol);
  return {eta / K - 1.0 / K, eta / K + 1.0 / K};
}

double wrap_pi(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x;
}

double clockwise_polar_angle(const Mat2& M) { return -polar_decompose(M).theta; }

}  // namespace

std::string ClassLabel::name() const {
  switch (tag) {
    case Tag::h: return "h";
    case Tag::p_minus: return case_id == 1 ? "p-r" : "p-";
    case Tag::p_plus: return case_id == 1 ? "p+r" : "p+";
    case Tag::p_star: return case_id == 1 ? "p*r" : "p*";
    case Tag::e_minus: return "e-";
    case Tag::e_plus: return "e+";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::unstable: return "unstable";
    case Stability::stable: return "stable";
    case Stability::strongly_stable: return "strongly_stable";
  }
  return "?";
}

const char* to_string(Trichotomy t) {
  switch (t) {
    case Trichotomy::less: return "less";
    case Trichotomy::equal: return "equal";
    case Trichotomy::greater: return "greater";
  }
  return "?";
}

WindingExtrema winding_extrema(const CoeffPath& S, int grid_n, double refine_tol, int k, double tol) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  return extrema_impl(S, grid_n, refine_tol, k, tol, monodromy(S, k * S.T, tol));
}

ClassLabel label_from_winding(double eta_minus, double eta_plus) {
  const double em = snap_half(eta_minus), ep = snap_half(eta_plus);
  if (!(em <= ep)) throw Error(ErrorKind::InvalidArgument, "eta_minus exceeds eta_plus");
  const long lo = static_cast<long>(std::ceil(2.0 * em));
  const long hi = static_cast<long>(std::floor(2.0 * ep));
  ClassLabel l;
  if (hi < lo) {
    const long n = static_cast<long>(std::floor(2.0 * em));
    l.case_id = 2;
    l.ell = floor_div2(n);
    l.tag = (n - 2 * l.ell == 0) ? Tag::e_minus : Tag::e_plus;
    return l;
  }
  if (hi > lo) {
    std::ostringstream os;
    os << "eta range [" << eta_minus << ", " << eta_plus << "] contains more than one point of Z/2";
    throw Error(ErrorKind::InconsistentClassification, os.str());
  }
  const long n = lo;
  const double h = 0.5 * static_cast<double>(n);
  if (n % 2 == 0) {
    l.case_id = 1;
    l.ell = n / 2;
  } else {
    l.case_id = 2;
    l.ell = floor_div2(n);
  }
  if (em == h && ep == h)
    l.tag = Tag::p_star;
  else if (ep == h)
    l.tag = Tag::p_minus;
  else if (em == h)
    l.tag = Tag::p_plus;
  else
    l.tag = Tag::h;
  return l;
}

long index_of(const ClassLabel& label) { return label.case_id == 1 ? 2 * label.ell : 2 * label.ell + 1; }

Stability stability_of(const ClassLabel& label) {
  switch (label.tag) {
    case Tag::h:
    case Tag::p_minus:
    case Tag::p_plus: return Stability::unstable;
    case Tag::p_star: return Stability::stable;
    case Tag::e_minus:
    case Tag::e_plus: return Stability::strongly_stable;
  }
  return Stability::unstable;
}

ClassLabel classify(const CoeffPath& S, int k, const IndexOptions& opt) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const Mat2 M = monodromy(S, k * S.T, opt.tol);
  const WindingExtrema e = extrema_impl(S, opt.grid_n, opt.refine_tol, k, opt.tol, M);
  return classify_from(e, M);
}

long cz_index(const CoeffPath& S, int k, const IndexOptions& opt) { return index_of(classify(S, k, opt)); }

long cz_index_via_polar(const FundamentalPath& path) {
  const Mat2& M = path.terminal;
  const Stratum st = lambda_stratum(normalize_symplectic(M));
  if (st == Stratum::zero) throw Error(ErrorKind::ResonantInput, "M(T) lies on Lambda0");

  double acc = 0.0;
  // Adds the angle increment between two samples, refining through the
  // dense output while the increment is large.
  auto advance = [&](auto&& self, double ta, double va, double tb, double vb, int depth) -> void {
    const double d = wrap_pi(vb - va);
    if (std::abs(d) >= 0.25 * kPi && depth < 40) {
      const double tm = 0.5 * (ta + tb);
      const double vm = clockwise_polar_angle(path.at(tm));
      self(self, ta, va, tm, vm, depth + 1);
      self(self, tm, vm, tb, vb, depth + 1);
      return;
    }
    if (std::abs(d) >= 0.5 * kPi) {
      std::ostringstream os;
      os << "polar angle jumps by " << d << " between t = " << ta << " and " << tb;
      throw Error(ErrorKind::LiftStepTooLarge, os.str());
    }
    acc += d;
  };
  double prev_t = path.times.front();
  double prev_v = clockwise_polar_angle(path.values.front());
  acc = prev_v;
  for (std::size_t i = 1; i < path.times.size(); ++i) {
    const double v = clockwise_polar_angle(path.values[i]);
    advance(advance, prev_t, prev_v, path.times[i], v, 0);
    prev_t = path.times[i];
    prev_v = v;
  }

  const double turns = acc / (2.0 * kPi);
  if (st == Stratum::minus) {
    const long ell = std::lround(turns);
    if (std::abs(acc - 2.0 * kPi * ell) >= 0.5 * kPi)
      throw Error(ErrorKind::InconsistentClassification, "lifted angle outside every Lambda- window");
    return 2 * ell;
  }
  return 2 * static_cast<long>(std::floor(turns)) + 1;
}

long cz_index_via_polar(const CoeffPath& S, int k, double tol) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  return cz_index_via_polar(integrate_fundamental(S, k * S.T, tol));
}

Interval rotation_number(const CoeffPath& S, int K, const IndexOptions& opt) {
  const WindingExtrema e = winding_extrema(S, opt.grid_n, opt.refine_tol, 1, opt.tol);
  return rotation_from(S, e, K, opt.tol);
}

IterationReport iterate_label(const ClassLabel& label, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (label.elliptic()) throw Error(ErrorKind::InvalidArgument, "closed iteration formulas need a h/p label");
  IterationReport r;
  r.k = k;
  r.from_formula = true;
  r.predicted_label.tag = label.tag;
  if (label.case_id == 1) {
    r.i_kT = 2L * k * label.ell;
    r.predicted_label.case_id = 1;
    r.predicted_label.ell = k * label.ell;
  } else {
    r.i_kT = static_cast<long>(k) * (2 * label.ell + 1);
    if (k % 2 == 0) {
      r.predicted_label.case_id = 1;
      r.predicted_label.ell = k * label.ell + k / 2;
    } else {
      r.predicted_label.case_id = 2;
      r.predicted_label.ell = k * label.ell + (k - 1) / 2;
    }
  }
  r.i_lo = r.i_hi = r.i_kT;
  if (label.tag == Tag::h)
    r.predicted_class = MultiplierClass::hyperbolic;
  else
    r.predicted_class = r.predicted_label.case_id == 1 ? MultiplierClass::parabolic_plus
                                                       : MultiplierClass::parabolic_minus;
  return r;
}

std::optional<std::pair<long, long>> rational_approx(double x, long max_den, double tol) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    if (std::abs(x - static_cast<double>(h2) / static_cast<double>(k2)) <= tol) return std::make_pair(h2, k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = r - a;
    if (frac <= 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

IterationReport iterate_index(const CoeffPath& S, int k, const IndexOptions& opt) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const Mat2 M = monodromy(S, S.T, opt.tol);
  const ClassLabel label = classify_from(extrema_impl(S, opt.grid_n, opt.refine_tol, 1, opt.tol, M), M);
  if (!label.elliptic()) return iterate_label(label, k);

  IterationReport r;
  r.k = k;
  r.from_formula = false;
  r.predicted_label = k == 1 ? label : classify(S, k, opt);
  r.i_kT = index_of(r.predicted_label);
  const long l = label.ell;
  if (label.tag == Tag::e_minus) {
    r.i_lo = 2 * k * l + 1;
    r.i_hi = 2 * k * l + k;
  } else {
    r.i_lo = 2 * k * l + k;
    r.i_hi = 2 * k * l + 2 * k - 1;
  }
  if (r.i_kT < r.i_lo || r.i_kT > r.i_hi) {
    std::ostringstream os;
    os << "i_kT = " << r.i_kT << " outside [" << r.i_lo << ", " << r.i_hi << "]";
    throw Error(ErrorKind::InconsistentClassification, os.str());
  }

  const double tr = M.trace() / std::sqrt(M.det());
  const double phi = std::acos(std::clamp(0.5 * tr, -1.0, 1.0));
  r.predicted_class = MultiplierClass::elliptic;
  if (auto pq = rational_approx(phi / std::numbers::pi, 64, 1e-9); pq && pq->second >= 2) {
    r.p = pq->first;
    r.q = pq->second;
    if (k % r.q == 0) {
      if (r.p % 2 == 0 || (k / r.q) % 2 == 0)
        r.predicted_class = MultiplierClass::parabolic_plus;
      else
        r.predicted_class = MultiplierClass::parabolic_minus;
    }
  }
  const Tag t = r.predicted_label.tag;
  bool agree = false;
  switch (r.predicted_class) {
    case MultiplierClass::elliptic: agree = r.predicted_label.elliptic(); break;
    case MultiplierClass::parabolic_plus: agree = t == Tag::p_star && r.predicted_label.case_id == 1; break;
    case MultiplierClass::parabolic_minus: agree = t == Tag::p_star && r.predicted_label.case_id == 2; break;
    case MultiplierClass::hyperbolic: break;
  }
  if (!agree) {
    std::ostringstream os;
    os << "commensurability schedule predicts " << to_string(r.predicted_class) << " at k = " << k
       << " but M(kT) is " << r.predicted_label.name();
    throw Error(ErrorKind::InconsistentClassification, os.str());
  }
  return r;
}

long direct_index(const CoeffPath& S, int k, const IndexOptions& opt) {
  const ClassLabel label = classify(S, 1, opt);
  if (!label.elliptic()) return iterate_label(label, k).i_kT;
  try {
    return cz_index_via_polar(S, k, opt.tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResonantInput) throw;
  }
  return cz_index(S, k, opt);
}

double mean_index(const CoeffPath& S, int K, const IndexOptions& opt) {
  const Interval rho = rotation_number(S, K, opt);
  const double m = 2.0 * rho.mid();
  std::vector<int> ks{K};
  if (K / 2 >= 1 && K / 2 != K) ks.insert(ks.begin(), K / 2);
  for (int k : ks) {
    const long ik = direct_index(S, k, opt);
    const double slope = static_cast<double>(ik) / k;
    if (std::abs(slope - m) > 3.0 / k + 2.0 / K) {
      std::ostringstream os;
      os << "slope check failed: i_kT/k = " << slope << " at k = " << k << ", m = " << m;
      throw Error(ErrorKind::InconsistentClassification, os.str());
    }
  }
  return m;
}

Stability stability(const CoeffPath& S, const IndexOptions& opt) { return stability_of(classify(S, 1, opt)); }

Stability stability_via_second_iterate(const CoeffPath& S, const IndexOptions& opt) {
  for (int k : {1, 2}) {
    const Mat2 M = monodromy(S, k * S.T, opt.tol);
    if (lambda_stratum((1.0 / std::sqrt(M.det())) * M) == Stratum::zero) {
      std::ostringstream os;
      os << "system is " << k << "T-resonant";
      throw Error(ErrorKind::ResonantInput, os.str());
    }
  }
  const long i1 = cz_index(S, 1, opt), i2 = cz_index(S, 2, opt);
  return (i1 % 2 != 0 && i2 % 2 != 0) ? Stability::stable : Stability::unstable;
}

Trichotomy decide_rotation_vs_winding(double eta_minus, double eta_plus, long j, int k,
                                      const std::optional<Interval>& rho) {
  constexpr double eps = kSnapBand, band = 1e-7;
  const double jd = static_cast<double>(j);
  Trichotomy t;
  if (eta_plus < jd - eps)
    t = Trichotomy::less;
  else if (eta_minus > jd + eps)
    t = Trichotomy::greater;
  else
    t = Trichotomy::equal;

  const double target = jd / k;
  const bool inside = !rho || rho->contains(target);
  const double mp = std::abs(eta_plus - jd), mm = std::abs(eta_minus - jd);
  const bool marginal = (mp >= eps && mp < band) || (mm >= eps && mm < band);
  if (marginal && inside) {
    std::ostringstream os;
    os << "eta_kT extrema within " << band << " of j = " << j;
    throw Error(ErrorKind::Undecidable, os.str());
  }
  if (rho && !rho->contains(target)) {
    const Trichotomy expect = rho->hi < target ? Trichotomy::less : Trichotomy::greater;
    if (expect != t) {
      std::ostringstream os;
      os << "winding decision " << to_string(t) << " contradicts rotation interval [" << rho->lo << ", "
         << rho->hi << "] for j/k = " << target;
      throw Error(ErrorKind::InconsistentClassification, os.str());
    }
  }
  return t;
}

Trichotomy rotation_vs_winding(const CoeffPath& S, int k, long j, int K_check, const IndexOptions& opt) {
  const WindingExtrema e = winding_extrema(S, opt.grid_n, opt.refine_tol, k, opt.tol);
  std::optional<Interval> rho;
  if (K_check > 0) rho = rotation_number(S, K_check, opt);
  return decide_rotation_vs_winding(e.eta_minus, e.eta_plus, j, k, rho);
}

IndexReport index_report(const CoeffPath& S, int K, const IndexOptions& opt) {
  IndexReport r;
  const Mat2 M = monodromy(S, S.T, opt.tol);
  const WindingExtrema e = extrema_impl(S, opt.grid_n, opt.refine_tol, 1, opt.tol, M);
  r.eta_minus = e.eta_minus;
  r.eta_plus = e.eta_plus;
  r.label = classify_from(e, M);
  r.i_T = index_of(r.label);
  r.rho_interval = rotation_from(S, e, K, opt.tol);
  r.m = mean_index(S, K, opt);
  const double rho = r.rho_interval.mid();
  r.tau = rho - std::floor(rho);
  r.stability = stability_of(r.label);
  r.multipliers = multipliers(M);
  return r;
}

}  // namespace hamrot
