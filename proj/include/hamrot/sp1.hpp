#pragma once

#include <array>
#include <complex>

namespace hamrot {

using Vec2 = std::array<double, 2>;

struct Mat2 {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

  double det() const { return m11 * m22 - m12 * m21; }
  double trace() const { return m11 + m22; }
  Mat2 transpose() const { return {m11, m21, m12, m22}; }
  // Frobenius norm.
  double norm() const;
  bool finite() const;

  Vec2 operator*(const Vec2& v) const { return {m11 * v[0] + m12 * v[1], m21 * v[0] + m22 * v[1]}; }
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(double s, const Mat2& a);

// Standard symplectic matrix.
inline constexpr Mat2 kJ{0.0, -1.0, 1.0, 0.0};

// Counterclockwise rotation O(theta) = [[cos, -sin], [sin, cos]].
Mat2 rotation(double theta);
// Symmetric positive definite symplectic factor P(tau, sigma).
Mat2 positive_factor(double tau, double sigma);

enum class MultiplierClass { hyperbolic, parabolic_plus, parabolic_minus, elliptic };
enum class Stratum { minus, zero, plus };

const char* to_string(MultiplierClass c);
const char* to_string(Stratum s);

struct MultiplierPair {
  std::complex<double> mu1, mu2;
  MultiplierClass cls = MultiplierClass::parabolic_plus;
};

struct PolarCoords {
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
};

// Relative band around tr = +-2 inside which a matrix counts as parabolic.
double trace_band(double trace);
// Allowed |det M - 1| before a matrix is rejected as not symplectic.
double symplectic_tolerance(const Mat2& m);

double symplectic_residual(const Mat2& m);

// Roots of mu^2 - tr(M) mu + 1. For elliptic input mu1 has positive
// imaginary part; for hyperbolic input |mu1| > 1.
MultiplierPair multipliers(const Mat2& m);

// Rescales a numerically symplectic matrix to determinant one. For very
// large matrices the computed determinant carries no information and the
// matrix is returned unchanged. NotSymplectic outside the tolerance.
Mat2 normalize_symplectic(const Mat2& m);

Stratum lambda_stratum(const Mat2& m);

PolarCoords polar_decompose(const Mat2& m);
Mat2 from_polar(const PolarCoords& p);

// Hermitian form <iJ zeta, zeta> for a unit-normalised zeta.
double krein_form(const std::array<std::complex<double>, 2>& zeta);

// Unit complex number: +1 / -1 for real spectra, the Krein-positive
// eigenvalue for elliptic matrices.
std::complex<double> rotation_function(const Mat2& m, double krein_tol = 1e-9);

}  // namespace hamrot
