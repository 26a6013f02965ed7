#include "hamrot/sp1.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hamrot/errors.hpp"

namespace hamrot {

double Mat2::norm() const { return std::sqrt(m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22); }

bool Mat2::finite() const {
  return std::isfinite(m11) && std::isfinite(m12) && std::isfinite(m21) && std::isfinite(m22);
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}
Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}
Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}
Mat2 operator*(double s, const Mat2& a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }

Mat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

Mat2 positive_factor(double tau, double sigma) {
  const double ch = std::cosh(tau), sh = std::sinh(tau);
  const double c = std::cos(sigma), s = std::sin(sigma);
  return {ch + sh * c, sh * s, sh * s, ch - sh * c};
}

const char* to_string(MultiplierClass c) {
  switch (c) {
    case MultiplierClass::hyperbolic: return "hyperbolic";
    case MultiplierClass::parabolic_plus: return "parabolic_plus";
    case MultiplierClass::parabolic_minus: return "parabolic_minus";
    case MultiplierClass::elliptic: return "elliptic";
  }
  return "?";
}

const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::minus: return "Lambda-";
    case Stratum::zero: return "Lambda0";
    case Stratum::plus: return "Lambda+";
  }
  return "?";
}

double trace_band(double trace) { return 1e-9 * (1.0 + std::abs(trace)); }

double symplectic_tolerance(const Mat2& m) {
  const double n = m.norm();
  return 1e-6 * std::max(1.0, n * n);
}

double symplectic_residual(const Mat2& m) { return std::abs(m.det() - 1.0); }

namespace {

void require_symplectic(const Mat2& m) {
  if (!m.finite()) throw Error(ErrorKind::NotSymplectic, "non-finite matrix entries");
  const double res = symplectic_residual(m);
  if (res > symplectic_tolerance(m)) {
    std::ostringstream os;
    os << "|det M - 1| = " << res;
    throw Error(ErrorKind::NotSymplectic, os.str());
  }
}

}  // namespace

MultiplierPair multipliers(const Mat2& m) {
  require_symplectic(m);
  const double tr = m.trace();
  const double band = trace_band(tr);
  MultiplierPair out;
  if (std::abs(tr - 2.0) < band) {
    out.mu1 = out.mu2 = 1.0;
    out.cls = MultiplierClass::parabolic_plus;
  } else if (std::abs(tr + 2.0) < band) {
    out.mu1 = out.mu2 = -1.0;
    out.cls = MultiplierClass::parabolic_minus;
  } else if (std::abs(tr) > 2.0) {
    // Larger root first; the smaller one as the reciprocal avoids cancellation.
    const double big = 0.5 * (tr + std::copysign(std::sqrt(tr * tr - 4.0), tr));
    out.mu1 = big;
    out.mu2 = 1.0 / big;
    out.cls = MultiplierClass::hyperbolic;
  } else {
    const double im = 0.5 * std::sqrt(4.0 - tr * tr);
    out.mu1 = {0.5 * tr, im};
    out.mu2 = {0.5 * tr, -im};
    out.cls = MultiplierClass::elliptic;
  }
  return out;
}

Mat2 normalize_symplectic(const Mat2& m) {
  if (!m.finite()) throw Error(ErrorKind::NotSymplectic, "matrix has non-finite entries");
  if (symplectic_residual(m) > symplectic_tolerance(m))
    throw Error(ErrorKind::NotSymplectic, "determinant too far from one");
  const double det = m.det();
  if (std::abs(det - 1.0) <= 0.5) return (1.0 / std::sqrt(det)) * m;
  return m;
}

Stratum lambda_stratum(const Mat2& m) {
  const double d = (1.0 - m.m11) * (1.0 - m.m22) - m.m12 * m.m21;
  if (std::abs(d) < trace_band(m.trace())) return Stratum::zero;
  return d < 0.0 ? Stratum::minus : Stratum::plus;
}

PolarCoords polar_decompose(const Mat2& m) {
  PolarCoords p;
  p.theta = std::atan2(m.m21 - m.m12, m.m11 + m.m22);
  if (p.theta <= -std::numbers::pi) p.theta = std::numbers::pi;
  const Mat2 pm = m * rotation(p.theta).transpose();
  const double half_diff = 0.5 * (pm.m11 - pm.m22);
  const double off = 0.5 * (pm.m12 + pm.m21);
  const double sh = std::hypot(half_diff, off);
  p.tau = std::asinh(sh);
  p.sigma = sh > 1e-14 ? std::atan2(off, half_diff) : 0.0;
  return p;
}

Mat2 from_polar(const PolarCoords& p) { return positive_factor(p.tau, p.sigma) * rotation(p.theta); }

double krein_form(const std::array<std::complex<double>, 2>& z) {
  // iJ z = i(-z2, z1), paired with conj(z).
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> v = i * (-z[1]) * std::conj(z[0]) + i * z[0] * std::conj(z[1]);
  return v.real();
}

std::complex<double> rotation_function(const Mat2& m, double krein_tol) {
  const MultiplierPair mp = multipliers(m);
  switch (mp.cls) {
    case MultiplierClass::parabolic_plus: return 1.0;
    case MultiplierClass::parabolic_minus: return -1.0;
    case MultiplierClass::hyperbolic: return mp.mu1.real() > 0.0 ? 1.0 : -1.0;
    case MultiplierClass::elliptic: break;
  }
  const std::complex<double> lam = mp.mu1;
  // Null vector of M - lam I from whichever row is better conditioned.
  std::array<std::complex<double>, 2> z;
  if (std::abs(m.m12) + std::abs(lam - m.m11) >= std::abs(m.m21) + std::abs(lam - m.m22)) {
    z = {m.m12, lam - m.m11};
  } else {
    z = {lam - m.m22, m.m21};
  }
  const double nz = std::sqrt(std::norm(z[0]) + std::norm(z[1]));
  z[0] /= nz;
  z[1] /= nz;
  const double k = krein_form(z);
  if (std::abs(k) < krein_tol) {
    std::ostringstream os;
    os << "Krein form " << k << " below tolerance";
    throw Error(ErrorKind::DegenerateKrein, os.str());
  }
  const std::complex<double> chosen = k > 0.0 ? mp.mu1 : mp.mu2;
  return chosen / std::abs(chosen);
}

}  // namespace hamrot
