#pragma once

#include <vector>

#include "hamrot/coeff_path.hpp"
#include "hamrot/ode.hpp"
#include "hamrot/sp1.hpp"

namespace hamrot {

inline constexpr double kDefaultTol = 1e-12;

// Fundamental matrix of J M' = S(t) M, M(0) = I, with dense output.
struct FundamentalPath {
  double t_end = 0.0;
  std::vector<double> times;   // accepted step nodes
  std::vector<Mat2> values;    // M at the nodes
  Mat2 terminal;
  DenseOutput<4> dense;

  Mat2 at(double t) const;
};

FundamentalPath integrate_fundamental(const CoeffPath& S, double t_end, double tol = kDefaultTol);
// Terminal value only, no dense record.
Mat2 monodromy(const CoeffPath& S, double t_end, double tol = kDefaultTol);

// Clockwise angle theta and log-radius of the solution from e^{-i omega}.
struct AngularSolution {
  double omega0 = 0.0;
  double t_end = 0.0;
  double theta_end = 0.0;
  double log_r_end = 0.0;
  DenseOutput<2> dense;  // empty when only the endpoint was requested

  double theta(double t) const;
  double r(double t) const;
  double r_end() const;
};

AngularSolution angle_lift(const CoeffPath& S, double omega, double t_end, double tol = kDefaultTol,
                           bool keep_dense = true);

// eta_{kT}(omega) = (theta(kT; omega) - omega) / 2 pi.
double winding(const CoeffPath& S, int k, double omega, double tol = kDefaultTol);
// d eta_{kT} / d omega from the terminal radius.
double winding_derivative(const CoeffPath& S, double omega, double tol = kDefaultTol, int k = 1);

}  // namespace hamrot
