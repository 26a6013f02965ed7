#include "hamrot/subharmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "hamrot/errors.hpp"
#include "hamrot/ode.hpp"
#include "hamrot/parallel.hpp"

namespace hamrot {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

OdeOptions ode_options(double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.max_steps = 2'000'000;
  return o;
}

// Flow in coordinates scaled by |z0| plus the clockwise angle, so the
// error control is relative to the size of the initial point.
struct ScaledFlow {
  const PlanarSystem& sys;
  double s;

  State<3> operator()(double t, const State<3>& w) const {
    const Vec2 z{s * w[0], s * w[1]};
    const Vec2 f = sys.field(t, z);
    const double rr = w[0] * w[0] + w[1] * w[1];
    return {f[0] / s, f[1] / s, (w[1] * f[0] - w[0] * f[1]) / (s * rr)};
  }
};

struct BlowUpGuard {
  const PlanarSystem& sys;
  double s;
  void operator()(double t, const State<3>& w) const {
    const double r = s * std::hypot(w[0], w[1]);
    if (!std::isfinite(r) || !std::isfinite(w[2]) || r > sys.safety_radius) {
      std::ostringstream os;
      os << "trajectory left the safety ball at t = " << t << " (|z| = " << r << ")";
      throw Error(ErrorKind::BlowUp, os.str());
    }
  }
};

OdeResult<3> run_flow(const PlanarSystem& sys, double t0, const Vec2& z0, double t1, double tol,
                      DenseOutput<3>* dense = nullptr) {
  const double s = norm2(z0);
  const State<3> w0{z0[0] / s, z0[1] / s, -std::atan2(z0[1], z0[0])};
  try {
    return dop853_integrate<3>(ScaledFlow{sys, s}, t0, w0, t1, ode_options(tol), dense, BlowUpGuard{sys, s});
  } catch (const Error& e) {
    // A step-size collapse on a runaway trajectory is reported as a blow-up.
    if (e.kind() == ErrorKind::ToleranceNotMet) throw Error(ErrorKind::BlowUp, e.what());
    throw;
  }
}

long gcd_abs(long a, long b) { return std::gcd(std::abs(a), std::abs(b)); }

std::vector<double> circle_rot(const PlanarSystem& sys, int k, double R, int m, double tol, unsigned workers = 0) {
  return parallel_map<double>(
      static_cast<std::size_t>(m),
      [&](std::size_t i) {
        const double a = 2.0 * kPi * static_cast<double>(i) / m;
        return poincare_map(sys, k, {R * std::cos(a), R * std::sin(a)}, tol).rot;
      },
      workers);
}

std::vector<double> ladder(double from_exp, double to_exp, int per_decade) {
  if (per_decade < 1) throw Error(ErrorKind::InvalidArgument, "per_decade must be positive");
  std::vector<double> r;
  const int n = static_cast<int>(std::lround(std::abs(to_exp - from_exp) * per_decade));
  const double dir = to_exp > from_exp ? 1.0 : -1.0;
  for (int i = 0; i <= n; ++i) r.push_back(std::pow(10.0, from_exp + dir * static_cast<double>(i) / per_decade));
  return r;
}

// Points z(lT), l = 0..k.
std::vector<Vec2> iterate_points(const PlanarSystem& sys, int k, const Vec2& z0, double tol) {
  std::vector<Vec2> pts{z0};
  Vec2 z = z0;
  for (int l = 1; l <= k; ++l) {
    const auto r = run_flow(sys, (l - 1) * sys.T, z, l * sys.T, tol);
    const double s = norm2(z);
    z = {s * r.y[0], s * r.y[1]};
    pts.push_back(z);
  }
  return pts;
}

double polar_angle(const Vec2& z) {
  double a = std::atan2(z[1], z[0]);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

bool radius_angle_less(const Vec2& a, const Vec2& b) {
  const double ra = norm2(a), rb = norm2(b);
  if (ra != rb) return ra < rb;
  return polar_angle(a) < polar_angle(b);
}

struct Polished {
  bool ok = false;
  Vec2 z{};
  double residual = std::numeric_limits<double>::infinity();
};

Polished polish(const PlanarSystem& sys, int k, Vec2 z, double tol, const OrbitSearchOptions& opt) {
  auto F = [&](const Vec2& p) {
    const PoincareResult r = poincare_map(sys, k, p, opt.int_tol);
    return Vec2{r.z[0] - p[0], r.z[1] - p[1]};
  };
  Polished out;
  try {
    Vec2 f = F(z);
    double res = norm2(f);
    for (int it = 0; it < opt.max_newton && res > 0.1 * tol; ++it) {
      const double h = 1e-6 * (1.0 + norm2(z));
      Mat2 Jm;
      for (int c = 0; c < 2; ++c) {
        Vec2 zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        const Vec2 fp = F(zp), fm = F(zm);
        const double d0 = (fp[0] - fm[0]) / (2.0 * h), d1 = (fp[1] - fm[1]) / (2.0 * h);
        if (c == 0) {
          Jm.m11 = d0;
          Jm.m21 = d1;
        } else {
          Jm.m12 = d0;
          Jm.m22 = d1;
        }
      }
      const double det = Jm.det();
      if (!std::isfinite(det) || det == 0.0) break;
      const Vec2 step{-(Jm.m22 * f[0] - Jm.m12 * f[1]) / det, -(-Jm.m21 * f[0] + Jm.m11 * f[1]) / det};
      double alpha = 1.0;
      bool improved = false;
      for (int half = 0; half < 30; ++half, alpha *= 0.5) {
        const Vec2 zn{z[0] + alpha * step[0], z[1] + alpha * step[1]};
        if (norm2(zn) == 0.0) continue;
        const Vec2 fn = F(zn);
        const double rn = norm2(fn);
        if (rn < res) {
          z = zn;
          f = fn;
          res = rn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    out.ok = res <= tol;
    out.z = z;
    out.residual = res;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

PlanarSystem embed_linear(const CoeffPath& S, const std::string& name) {
  PlanarSystem sys;
  sys.name = name;
  sys.T = S.T;
  sys.S0 = S;
  sys.Sinf = S;
  sys.field = [S](double t, const Vec2& z) {
    double a, b, c;
    S.eval(t, a, b, c);
    return Vec2{b * z[0] + c * z[1], -a * z[0] - b * z[1]};
  };
  return sys;
}

void validate_planar_system(const PlanarSystem& sys, int samples) {
  if (!sys.field) throw Error(ErrorKind::InvalidArgument, "system has no vector field");
  if (std::abs(sys.S0.T - sys.T) > 1e-12 * sys.T)
    throw Error(ErrorKind::InvalidArgument, "S0 period differs from the system period");
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ut(0.0, sys.T);
  for (int i = 0; i < samples; ++i) {
    const double t = ut(rng);
    const Vec2 f0 = sys.field(t, {0.0, 0.0});
    if (!(norm2(f0) <= 1e-12)) {
      std::ostringstream os;
      os << "field does not vanish at the origin (t = " << t << ")";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    const double r = 1e-5;
    for (int a = 0; a < 8; ++a) {
      const double ang = 2.0 * kPi * a / 8.0;
      const Vec2 z{r * std::cos(ang), r * std::sin(ang)};
      const Vec2 f = sys.field(t, z);
      double sa, sb, sc;
      sys.S0.eval(t, sa, sb, sc);
      const Vec2 lin{sb * z[0] + sc * z[1], -sa * z[0] - sb * z[1]};
      if (!(norm2({f[0] - lin[0], f[1] - lin[1]}) <= 1e-3 * r)) {
        throw Error(ErrorKind::InvalidArgument, "S0 is not the linearization of the field at the origin");
      }
    }
  }
}

Interval rotation_gap(const Interval& rho0, const Interval& rhoinf) {
  if (rho0.hi < rhoinf.lo) return {rho0.hi, rhoinf.lo};
  if (rhoinf.hi < rho0.lo) return {rhoinf.hi, rho0.lo};
  std::ostringstream os;
  os << "rotation intervals [" << rho0.lo << ", " << rho0.hi << "] and [" << rhoinf.lo << ", " << rhoinf.hi
     << "] overlap";
  throw Error(ErrorKind::GapUncertified, os.str());
}

std::vector<SubharmonicCandidate> candidates(const Interval& rho0, const Interval& rhoinf, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const Interval gap = rotation_gap(rho0, rhoinf);
  std::vector<SubharmonicCandidate> out;
  const long jlo = static_cast<long>(std::floor(gap.lo * k)) - 1;
  const long jhi = static_cast<long>(std::ceil(gap.hi * k)) + 1;
  for (long j = jlo; j <= jhi; ++j) {
    if (j == 0) continue;
    const double r = static_cast<double>(j) / k;
    if (!(gap.lo < r && r < gap.hi)) continue;
    if (gcd_abs(k, j) != 1) continue;
    out.push_back({k, j, true, true});
  }
  return out;
}

long euler_phi(long n) {
  if (n <= 0) return 0;
  long result = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

KStarScan k_star_scan(const Interval& rho0, const Interval& rhoinf, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const Interval gap = rotation_gap(rho0, rhoinf);
  KStarScan s;
  s.horizon = horizon;
  // An integer l on the infinity side of the gap, nearest to it.
  const bool up = rho0.lo > rhoinf.hi;
  std::optional<long> l;
  if (up) {
    const double c = std::ceil(rhoinf.hi);
    if (c < rho0.lo) l = static_cast<long>(c);
  } else {
    const double f = std::floor(rhoinf.lo);
    if (f > rho0.hi) l = static_cast<long>(f);
  }
  for (int k = 1; k <= horizon; ++k) {
    s.counts.push_back(static_cast<int>(candidates(rho0, rhoinf, k).size()));
    if (l) {
      const double span = up ? k * (gap.hi - *l) : k * (*l - gap.lo);
      s.euler_phi_estimate.push_back(euler_phi(static_cast<long>(std::floor(span))));
    } else {
      s.euler_phi_estimate.push_back(-1);
    }
  }
  if (s.counts.back() == 0) {
    std::ostringstream os;
    os << "no candidate at k = " << horizon;
    throw Error(ErrorKind::NoneWithinHorizon, os.str());
  }
  s.k_star = horizon;
  while (s.k_star > 1 && s.counts[s.k_star - 2] > 0) --s.k_star;
  return s;
}

PoincareResult poincare_map(const PlanarSystem& sys, int k, const Vec2& z0, double tol) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  PoincareResult out;
  if (z0[0] == 0.0 && z0[1] == 0.0) {
    out.z = {0.0, 0.0};
    out.rot = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double s = norm2(z0);
  const auto r = run_flow(sys, 0.0, z0, k * sys.T, tol);
  out.z = {s * r.y[0], s * r.y[1]};
  out.rot = (r.y[2] + std::atan2(z0[1], z0[0])) / (2.0 * kPi);
  return out;
}

std::vector<OrbitSample> sample_orbit(const PlanarSystem& sys, int k, const Vec2& z0, int per_period, double tol) {
  if (per_period < 1) throw Error(ErrorKind::InvalidArgument, "per_period must be positive");
  std::vector<OrbitSample> out;
  if (z0[0] == 0.0 && z0[1] == 0.0) {
    for (int i = 0; i <= k * per_period; ++i) out.push_back({i * sys.T / per_period, 0.0, 0.0});
    return out;
  }
  DenseOutput<3> dense;
  const double s = norm2(z0);
  run_flow(sys, 0.0, z0, k * sys.T, tol, &dense);
  const int n = k * per_period;
  for (int i = 0; i <= n; ++i) {
    const double t = k * sys.T * static_cast<double>(i) / n;
    const State<3> w = i == 0 ? State<3>{z0[0] / s, z0[1] / s, 0.0} : dense(t);
    out.push_back({t, s * w[0], s * w[1]});
  }
  return out;
}

std::vector<double> inner_ladder(int per_decade) { return ladder(-1.0, -8.0, per_decade); }
std::vector<double> outer_ladder(int per_decade) { return ladder(1.0, 8.0, per_decade); }

Interval rotation_at_zero(const PlanarSystem& sys, int K) { return rotation_number(sys.S0, K); }

Interval rotation_at_infinity(const PlanarSystem& sys, int K) {
  if (sys.Sinf) return rotation_number(*sys.Sinf, K);
  if (sys.sublinear_at_infinity) return {0.0, 0.0};
  throw Error(ErrorKind::InvalidArgument, "system has no linearization at infinity");
}

TwistRadii twist_radii(const PlanarSystem& sys, int k, long j, int grid_m, const TwistOptions& opt) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (grid_m < 4) throw Error(ErrorKind::InvalidArgument, "grid_m must be at least 4");
  const Interval rho0 = rotation_at_zero(sys), rinf = rotation_at_infinity(sys);
  const Interval gap = rotation_gap(rho0, rinf);
  const double jk = static_cast<double>(j) / k;
  if (!(gap.lo < jk && jk < gap.hi)) {
    std::ostringstream os;
    os << "j/k = " << jk << " is not inside the rotation gap (" << gap.lo << ", " << gap.hi << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  TwistRadii out;
  out.inner_above = rho0.lo > rinf.hi;
  const double margin = 10.0 * opt.tol;
  const double jd = static_cast<double>(j);
  auto holds = [&](const std::vector<double>& rots, bool above, double& extreme) {
    if (above) {
      extreme = *std::min_element(rots.begin(), rots.end());
      return extreme > jd + margin;
    }
    extreme = *std::max_element(rots.begin(), rots.end());
    return extreme < jd - margin;
  };
  bool inner_ok = false, outer_ok = false;
  for (double R : inner_ladder(opt.per_decade)) {
    try {
      if (holds(circle_rot(sys, k, R, grid_m, opt.tol), out.inner_above, out.inner_extreme)) {
        out.r_hat = R;
        inner_ok = true;
        break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BlowUp) throw;
    }
  }
  for (double R : outer_ladder(opt.per_decade)) {
    try {
      if (holds(circle_rot(sys, k, R, grid_m, opt.tol), !out.inner_above, out.outer_extreme)) {
        out.r_check = R;
        outer_ok = true;
        break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BlowUp) throw;
      break;  // larger circles only get worse
    }
  }
  if (!inner_ok || !outer_ok) {
    std::ostringstream os;
    os << "twist for (k, j) = (" << k << ", " << j << ") not found on the "
       << (!inner_ok ? "inner" : "outer") << " radius ladder";
    throw Error(ErrorKind::TwistNotFound, os.str());
  }
  return out;
}

int time_shift_match(const PlanarSystem& sys, int k, const Vec2& z, const Vec2& w, double tol, double int_tol) {
  const std::vector<Vec2> pts = iterate_points(sys, k, z, int_tol);
  for (int l = 0; l < k; ++l)
    if (norm2({pts[l][0] - w[0], pts[l][1] - w[1]}) <= tol) return l;
  return -1;
}

std::vector<OrbitResult> find_orbits(const PlanarSystem& sys, int k, long j, double r_hat, double r_check,
                                     double tol, const OrbitSearchOptions& opt) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (j == 0) throw Error(ErrorKind::InvalidArgument, "winding number j = 0 is excluded");
  if (!(r_hat > 0.0 && r_check > r_hat)) throw Error(ErrorKind::InvalidArgument, "need 0 < r_hat < r_check");
  if (opt.n_radii < 1 || opt.n_angles < 1) throw Error(ErrorKind::InvalidArgument, "empty seed grid");

  const int nr = opt.n_radii, na = opt.n_angles;
  const std::size_t n_seeds = static_cast<std::size_t>(nr) * na;
  auto seed_point = [&](std::size_t idx) {
    const int ir = static_cast<int>(idx / na), ia = static_cast<int>(idx % na);
    const double r = r_hat * std::pow(r_check / r_hat, (ir + 0.5) / nr);
    const double a = 2.0 * kPi * ia / na;
    return Vec2{r * std::cos(a), r * std::sin(a)};
  };
  struct SeedEval {
    bool ok = false;
    double rot = 0.0, res = 0.0;
  };
  const auto evals = parallel_map<SeedEval>(
      n_seeds,
      [&](std::size_t i) {
        SeedEval e;
        const Vec2 z = seed_point(i);
        try {
          const PoincareResult p = poincare_map(sys, k, z, opt.int_tol);
          e.ok = true;
          e.rot = p.rot;
          e.res = norm2({p.z[0] - z[0], p.z[1] - z[1]}) / (1.0 + norm2(z));
        } catch (const Error&) {
        }
        return e;
      },
      opt.workers);

  auto admissible = [&](std::size_t i) { return evals[i].ok && std::abs(evals[i].rot - j) < 0.5; };
  // Seeds whose relative displacement is a local minimum over the grid go
  // first; the rest are only polished if too few orbits turn up.
  std::vector<std::size_t> primary, secondary;
  for (std::size_t i = 0; i < n_seeds; ++i) {
    if (!admissible(i)) continue;
    const int ir = static_cast<int>(i / na), ia = static_cast<int>(i % na);
    bool local_min = true;
    for (int dr = -1; dr <= 1 && local_min; ++dr) {
      for (int da = -1; da <= 1; ++da) {
        if (dr == 0 && da == 0) continue;
        const int r2 = ir + dr;
        if (r2 < 0 || r2 >= nr) continue;
        const std::size_t n = static_cast<std::size_t>(r2) * na + static_cast<std::size_t>((ia + da + na) % na);
        if (evals[n].ok && evals[n].res < evals[i].res) {
          local_min = false;
          break;
        }
      }
    }
    (local_min ? primary : secondary).push_back(i);
  }

  std::vector<OrbitResult> found;
  std::vector<std::vector<Vec2>> found_points;
  auto absorb = [&](const std::vector<std::size_t>& batch) {
    const auto polished = parallel_map<Polished>(
        batch.size(), [&](std::size_t b) { return polish(sys, k, seed_point(batch[b]), tol, opt); }, opt.workers);
    for (const Polished& p : polished) {
      if (!p.ok) continue;
      std::vector<Vec2> pts;
      try {
        pts = iterate_points(sys, k, p.z, opt.int_tol);
      } catch (const Error&) {
        continue;
      }
      pts.pop_back();
      bool duplicate = false;
      for (const auto& other : found_points) {
        for (const Vec2& q : pts) {
          if (norm2({q[0] - other[0][0], q[1] - other[0][1]}) <= opt.merge_tol * (1.0 + norm2(q))) {
            duplicate = true;
            break;
          }
        }
        if (duplicate) break;
      }
      if (duplicate) continue;
      // Canonical representative: smallest radius, then angle.
      const Vec2 rep = *std::min_element(pts.begin(), pts.end(), radius_angle_less);
      OrbitResult o;
      o.z0 = rep;
      try {
        const PoincareResult pr = poincare_map(sys, k, rep, opt.int_tol);
        o.residual = norm2({pr.z[0] - rep[0], pr.z[1] - rep[1]});
        o.rot = pr.rot;
      } catch (const Error&) {
        continue;
      }
      o.winding = std::lround(o.rot);
      if (o.residual > tol || o.winding != j || std::abs(o.rot - static_cast<double>(j)) > 1e-6) continue;
      std::vector<Vec2> canon = pts;
      std::rotate(canon.begin(), std::find(canon.begin(), canon.end(), rep), canon.end());
      o.minimal_period = gcd_abs(k, j) == 1;
      for (int d = 1; d < k && o.minimal_period; ++d) {
        if (k % d != 0) continue;
        const Vec2& zd = canon[static_cast<std::size_t>(d)];
        if (norm2({zd[0] - rep[0], zd[1] - rep[1]}) <= 1e-6 * (1.0 + norm2(rep))) o.minimal_period = false;
      }
      found_points.push_back(canon);
      found.push_back(std::move(o));
    }
  };
  absorb(primary);
  if (found.size() < 2) absorb(secondary);

  if (found.empty()) {
    std::ostringstream os;
    os << "no " << k << "T-periodic orbit with winding " << j << " polished in the annulus [" << r_hat << ", "
       << r_check << "]";
    throw Error(ErrorKind::NoOrbitFound, os.str());
  }
  std::sort(found.begin(), found.end(),
            [](const OrbitResult& a, const OrbitResult& b) { return radius_angle_less(a.z0, b.z0); });
  for (auto& o : found) o.orbit_samples = sample_orbit(sys, k, o.z0, 64, opt.int_tol);
  return found;
}

bool verify_hsub(const PlanarSystem& sys, int k, double R, int grid_m, double margin, double tol) {
  if (grid_m < 1 || !(R > 0.0)) throw Error(ErrorKind::InvalidArgument, "need R > 0 and grid_m >= 1");
  try {
    const auto rots = circle_rot(sys, k, R, grid_m, tol);
    double worst = 0.0;
    for (double r : rots) worst = std::max(worst, std::abs(r));
    return worst < 1.0 - margin;
  } catch (const Error&) {
    return false;
  }
}

double hsub_radius(const PlanarSystem& sys, int k, int grid_m, const TwistOptions& opt) {
  for (double R : outer_ladder(opt.per_decade))
    if (verify_hsub(sys, k, R, grid_m, 1e-6, opt.tol)) return R;
  std::ostringstream os;
  os << "no ladder radius satisfies |Rot_" << k << "| < 1";
  throw Error(ErrorKind::TwistNotFound, os.str());
}

}  // namespace hamrot
