#include "hamrot/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

#include "hamrot/errors.hpp"
#include "hamrot/subharmonics.hpp"

namespace hamrot {

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicFunction cosine_modulated(double mean, double amp, double T) {
  return PeriodicFunction::trig(T, {mean, mean * amp});
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

double sample_max_abs(const PeriodicFunction& f, double T, int n = 1024) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(f(T * i / n)));
  return m;
}

void require_nonneg_nonzero(const PeriodicFunction& f, double T, const char* what) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 1024; ++i) {
    const double v = f(T * i / 1024.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < 0.0 || hi <= 0.0) {
    std::ostringstream os;
    os << what << " must be nonnegative and not identically zero";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries{
      {"zero", SystemKind::linear, {{"T", 1.0}}, "S = 0"},
      {"identity", SystemKind::linear, {{"T", 2.0 * kPi}}, "S = I (harmonic rotation)"},
      {"saddle", SystemKind::linear, {{"T", 1.0}}, "S = diag(-1, 1), u'' - u = 0"},
      {"constant", SystemKind::linear, {{"a", 1.0}, {"b", 0.0}, {"c", 1.0}, {"T", 2.0 * kPi}}, "constant S"},
      {"hill", SystemKind::linear, {{"q", 0.0}, {"eps", 0.0}, {"T", 2.0 * kPi}},
       "u'' + (q + eps cos(2 pi t / T)) u = 0"},
      {"mathieu", SystemKind::linear, {{"delta", 0.25}, {"eps", 0.0}, {"T", 2.0 * kPi}},
       "u'' + (delta + eps cos(2 pi t / T)) u = 0"},
      {"saturating", SystemKind::nonlinear, {{"q0", 9.0}, {"amp", 0.0}, {"T", 2.0 * kPi}},
       "u'' + q0 (1 + amp cos(2 pi t / T)) u / (1 + u^2) = 0"},
      {"lotka_volterra", SystemKind::nonlinear,
       {{"alpha", 1.0}, {"alpha1", 0.5}, {"beta", 1.0}, {"beta1", 0.5}, {"T", 2.0 * kPi}},
       "x' = beta(t)(e^y - 1), y' = alpha(t)(1 - e^x), alpha = alpha + alpha1 cos, beta = beta + beta1 cos"},
      {"minkowski", SystemKind::nonlinear, {{"q0", 4.0}, {"amp", 0.3}, {"a", 1.0}, {"T", 2.0 * kPi}},
       "(phi_a(u'))' + q0 (1 + amp cos(2 pi t / T)) u / (1 + u^2) = 0 around u = 0"},
  };
  return entries;
}

double parse_number(const std::string& raw) {
  std::string text = trim(raw);
  for (std::size_t p; (p = text.find("\xcf\x80")) != std::string::npos;) text.replace(p, 2, "pi");
  static const std::regex re(
      R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*(pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[2].matched && !m[3].matched))
    throw Error(ErrorKind::InvalidArgument, "cannot parse number '" + raw + "'");
  double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[3].matched) v *= kPi;
  if (m[4].matched) {
    const double d = std::stod(m[4].str());
    if (d == 0.0) throw Error(ErrorKind::InvalidArgument, "division by zero in '" + raw + "'");
    v /= d;
  }
  if (m[1].str() == "-") v = -v;
  return v;
}

SystemSpec parse_system_spec(const std::string& text) {
  SystemSpec spec;
  std::string s = trim(text);
  const auto cut = s.find_first_of(" \t,");
  spec.name = s.substr(0, cut);
  if (spec.name.empty()) throw Error(ErrorKind::InvalidArgument, "empty system name");
  std::string rest = cut == std::string::npos ? "" : s.substr(cut);
  std::replace(rest.begin(), rest.end(), ',', ' ');
  std::istringstream is(rest);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::InvalidArgument, "expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    if (spec.params.count(key)) throw Error(ErrorKind::InvalidArgument, "parameter '" + key + "' given twice");
    spec.params[key] = parse_number(tok.substr(eq + 1));
  }
  return spec;
}

CoeffPath make_hill(const PeriodicFunction& q, double T) {
  return CoeffPath(T, q, PeriodicFunction::constant(0.0), PeriodicFunction::constant(1.0));
}

LotkaVolterraSystem make_lotka_volterra_log(const PeriodicFunction& alpha, const PeriodicFunction& beta, double T) {
  require_nonneg_nonzero(alpha, T, "alpha");
  require_nonneg_nonzero(beta, T, "beta");
  LotkaVolterraSystem out;
  PlanarSystem& sys = out.system;
  sys.name = "lotka_volterra";
  sys.T = T;
  sys.S0 = CoeffPath(T, alpha, PeriodicFunction::constant(0.0), beta);
  sys.sublinear_at_infinity = true;
  // Along orbits the coordinates reach roughly -H, with H ~ e^{|z0|}; only
  // non-finite values are treated as a blow-up.
  sys.safety_radius = 1e300;
  sys.field = [alpha, beta](double t, const Vec2& z) {
    return Vec2{beta(t) * std::expm1(z[1]), -alpha(t) * std::expm1(z[0])};
  };
  validate_planar_system(sys);
  out.rho0 = rotation_number(sys.S0, 200);
  if (!(out.rho0.lo > 0.0)) {
    std::ostringstream os;
    os << "rotation interval of the linearization [" << out.rho0.lo << ", " << out.rho0.hi << "] touches 0";
    throw Error(ErrorKind::CertificateFailed, os.str());
  }
  return out;
}

PlanarSystem make_saturating_scalar(const PeriodicFunction& q0, double T) {
  PlanarSystem sys;
  sys.name = "saturating";
  sys.T = T;
  sys.S0 = make_hill(q0, T);
  sys.Sinf = make_hill(PeriodicFunction::constant(0.0), T);
  sys.field = [q0](double t, const Vec2& z) { return Vec2{z[1], -q0(t) * z[0] / (1.0 + z[0] * z[0])}; };
  validate_planar_system(sys);
  return sys;
}

double minkowski_phi(double s, double a) {
  const double r = s / a;
  return s / std::sqrt(1.0 - r * r);
}

double minkowski_phi_inverse(double v, double a) {
  const double r = v / a;
  return v / std::sqrt(1.0 + r * r);
}

PlanarSystem make_minkowski(const ScalarNonlinearity& fn, double a, const PeriodicFunction& ubar, double T) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "a must be positive");
  if (!fn.f || !fn.df_du) throw Error(ErrorKind::InvalidArgument, "nonlinearity needs f and df/du");
  const PeriodicFunction ub = ubar.with_period(ubar.is_constant() ? T : ubar.period());
  if (std::abs(ub.period() - T) > 1e-12 * T) throw Error(ErrorKind::InvalidArgument, "ubar period differs from T");

  // ubar must solve (phi_a(u'))' + f(t, u) = 0.
  const bool trig = ub.kind() == PeriodicFunction::Kind::trig;
  const PeriodicFunction d1 = trig ? ub.derivative_function() : ub;
  const PeriodicFunction d2 = trig ? d1.derivative_function() : ub;
  auto ubar_d1 = [&](double t) { return trig ? d1(t) : ub.derivative(t); };
  auto ubar_d2 = [&](double t) {
    if (trig) return d2(t);
    const double h = 1e-5 * T;
    return (ub.derivative(t + h) - ub.derivative(t - h)) / (2.0 * h);
  };
  double worst = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double t = T * i / 256.0;
    const double up = ubar_d1(t);
    if (!(std::abs(up) < a)) throw Error(ErrorKind::NotASolution, "|ubar'| must stay below a");
    const double r = up / a;
    const double dphi = std::pow(1.0 - r * r, -1.5);
    worst = std::max(worst, std::abs(dphi * ubar_d2(t) + fn.f(t, ub(t))));
  }
  if (!(worst <= 1e-8)) {
    std::ostringstream os;
    os << "ubar is not a T-periodic solution (residual " << worst << ")";
    throw Error(ErrorKind::NotASolution, os.str());
  }

  const double L = sample_max_abs(ub, T) + 2.0 * a * T;
  auto ftilde = [fn, L](double t, double u) { return fn.f(t, std::clamp(u, -L, L)); };

  PlanarSystem sys;
  sys.name = "minkowski";
  sys.T = T;
  // Linearization: a(t) = df/du(t, ubar), c(t) = 1 / phi_a'(ubar').
  const int n = 512;
  std::vector<double> as(n), cs(n);
  bool const_c = true;
  for (int i = 0; i < n; ++i) {
    const double t = T * i / n;
    as[i] = fn.df_du(t, ub(t));
    const double r = ubar_d1(t) / a;
    cs[i] = std::pow(1.0 - r * r, 1.5);
    if (cs[i] != cs[0]) const_c = false;
  }
  bool const_a = std::all_of(as.begin(), as.end(), [&](double v) { return v == as[0]; });
  const PeriodicFunction a_fn = const_a ? PeriodicFunction::constant(as[0]) : PeriodicFunction::sampled(T, as);
  const PeriodicFunction c_fn = const_c ? PeriodicFunction::constant(cs[0]) : PeriodicFunction::sampled(T, cs);
  sys.S0 = CoeffPath(T, a_fn, PeriodicFunction::constant(0.0), c_fn);
  sys.Sinf = CoeffPath::constant(0.0, 0.0, 0.0, T);
  sys.field = [ub, ubar_d1_fn = d1, trig, a, ftilde](double t, const Vec2& z) {
    const double up = trig ? ubar_d1_fn(t) : ub.derivative(t);
    const double vbar = minkowski_phi(up, a);
    const double u0 = ub(t);
    return Vec2{minkowski_phi_inverse(z[1] + vbar, a) - up, -(ftilde(t, z[0] + u0) - ftilde(t, u0))};
  };
  validate_planar_system(sys);
  return sys;
}

BuiltSystem build_system(const std::string& text) { return build_system(parse_system_spec(text)); }

BuiltSystem build_system(const SystemSpec& spec) {
  const auto& entries = catalog_entries();
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.name == spec.name; });
  if (it == entries.end()) throw Error(ErrorKind::InvalidArgument, "unknown catalog system '" + spec.name + "'");
  BuiltSystem out;
  out.kind = it->kind;
  out.name = it->name;
  for (const auto& [k, v] : it->defaults) out.params[k] = v;
  for (const auto& [k, v] : spec.params) {
    if (!out.params.count(k))
      throw Error(ErrorKind::InvalidArgument, "system '" + spec.name + "' has no parameter '" + k + "'");
    out.params[k] = v;
  }
  const auto& p = out.params;
  const double T = p.at("T");
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  const std::string& n = out.name;
  if (n == "zero") {
    out.linear = CoeffPath::constant(0.0, 0.0, 0.0, T);
  } else if (n == "identity") {
    out.linear = CoeffPath::constant(1.0, 0.0, 1.0, T);
  } else if (n == "saddle") {
    out.linear = CoeffPath::constant(-1.0, 0.0, 1.0, T);
  } else if (n == "constant") {
    out.linear = CoeffPath::constant(p.at("a"), p.at("b"), p.at("c"), T);
  } else if (n == "hill" || n == "mathieu") {
    const double mean = n == "hill" ? p.at("q") : p.at("delta");
    const PeriodicFunction q = PeriodicFunction::trig(T, {mean, p.at("eps")});
    out.hill = HillProblem{q, T};
    out.linear = make_hill(q, T);
  } else if (n == "saturating") {
    const PeriodicFunction q0 = cosine_modulated(p.at("q0"), p.at("amp"), T);
    out.nonlinear = make_saturating_scalar(q0, T);
    out.hill = HillProblem{q0, T};
    out.linear = out.nonlinear->S0;
  } else if (n == "lotka_volterra") {
    const PeriodicFunction al = PeriodicFunction::trig(T, {p.at("alpha"), p.at("alpha1")});
    const PeriodicFunction be = PeriodicFunction::trig(T, {p.at("beta"), p.at("beta1")});
    out.nonlinear = make_lotka_volterra_log(al, be, T).system;
    out.linear = out.nonlinear->S0;
  } else if (n == "minkowski") {
    const PeriodicFunction q0 = cosine_modulated(p.at("q0"), p.at("amp"), T);
    ScalarNonlinearity f;
    f.f = [q0](double t, double u) { return q0(t) * u / (1.0 + u * u); };
    f.df_du = [q0](double t, double u) {
      const double d = 1.0 + u * u;
      return q0(t) * (1.0 - u * u) / (d * d);
    };
    out.nonlinear = make_minkowski(f, p.at("a"), PeriodicFunction::constant(0.0), T);
    // The sampled linearization is replaced by the exact one for ubar = 0.
    out.nonlinear->S0 = CoeffPath(T, q0, PeriodicFunction::constant(0.0), PeriodicFunction::constant(1.0));
    out.hill = HillProblem{q0, T};
    out.linear = out.nonlinear->S0;
  }
  return out;
}

}  // namespace hamrot
