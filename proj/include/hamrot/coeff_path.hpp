#pragma once

#include <vector>

#include "hamrot/sp1.hpp"

namespace hamrot {

// A T-periodic scalar function: either a finite trigonometric polynomial
// (coefficient n multiplies cos/sin of 2 pi n t / T) or a uniformly sampled
// table on [0, T) read back with periodic Catmull-Rom cubics.
class PeriodicFunction {
 public:
  enum class Kind { trig, sampled };

  PeriodicFunction() : cos_{0.0}, sin_{0.0} {}

  static PeriodicFunction constant(double value);
  static PeriodicFunction trig(double period, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs = {});
  static PeriodicFunction sampled(double period, std::vector<double> samples);

  double operator()(double t) const;
  // First derivative in t (exact for trig polynomials, from the cubic
  // interpolant for sampled tables).
  double derivative(double t) const;
  // Derivative as a new function; trig polynomials only.
  PeriodicFunction derivative_function() const;

  Kind kind() const { return kind_; }
  double period() const { return period_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  const std::vector<double>& samples() const { return samples_; }
  double offset() const { return offset_; }

  bool is_constant() const;
  // Value plus a constant.
  PeriodicFunction shifted(double c) const;
  PeriodicFunction scaled(double s) const;
  // Upper bound for the sup norm (exact for constants).
  double sup_bound() const;
  // Same function, declared with a different period; only allowed for
  // constants, which have no intrinsic period.
  PeriodicFunction with_period(double period) const;

  // Evaluation when cos/sin of the fundamental frequency at t are already
  // known (shared by the three entries of a CoeffPath).
  double eval_trig(double c1, double s1) const;
  double eval_sampled(double t_reduced) const;

 private:
  Kind kind_ = Kind::trig;
  double period_ = 1.0;
  std::vector<double> cos_, sin_;
  std::vector<double> samples_;
  double offset_ = 0.0;
};

// Symmetric path S(t) = [[a, b], [b, c]] with common period T.
struct CoeffPath {
  double T = 1.0;
  PeriodicFunction a, b, c;

  CoeffPath() = default;
  CoeffPath(double period, PeriodicFunction a_, PeriodicFunction b_, PeriodicFunction c_);

  static CoeffPath constant(double a, double b, double c, double period);

  void eval(double t, double& a_out, double& b_out, double& c_out) const;
  Mat2 S(double t) const;

 private:
  bool all_trig_ = true;
  bool all_constant_ = false;
};

}  // namespace hamrot
