#include "hamrot/linear_flow.hpp"

#include <cmath>
#include <numbers>

#include "hamrot/errors.hpp"

namespace hamrot {

namespace {

OdeOptions options_for(double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol;
  return o;
}

Mat2 to_mat(const State<4>& y) { return {y[0], y[1], y[2], y[3]}; }

auto fundamental_rhs(const CoeffPath& S) {
  return [&S](double t, const State<4>& y) {
    double a, b, c;
    S.eval(t, a, b, c);
    // M' = -J S M, and -J S = [[b, c], [-a, -b]].
    return State<4>{b * y[0] + c * y[2], b * y[1] + c * y[3], -a * y[0] - b * y[2], -a * y[1] - b * y[3]};
  };
}

}  // namespace

Mat2 FundamentalPath::at(double t) const {
  if (t <= 0.0 || dense.empty()) return Mat2::identity();
  if (t >= t_end) return terminal;
  return to_mat(dense(t));
}

FundamentalPath integrate_fundamental(const CoeffPath& S, double t_end, double tol) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  FundamentalPath p;
  p.t_end = t_end;
  const State<4> y0{1.0, 0.0, 0.0, 1.0};
  const auto res = dop853_integrate<4>(fundamental_rhs(S), 0.0, y0, t_end, options_for(tol), &p.dense);
  p.terminal = to_mat(res.y);
  p.times = p.dense.nodes();
  p.values.reserve(p.times.size());
  for (std::size_t i = 0; i < p.dense.size(); ++i) p.values.push_back(to_mat(p.dense.segment(i).y0));
  p.values.push_back(p.terminal);
  return p;
}

Mat2 monodromy(const CoeffPath& S, double t_end, double tol) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  const State<4> y0{1.0, 0.0, 0.0, 1.0};
  return to_mat(dop853_integrate<4>(fundamental_rhs(S), 0.0, y0, t_end, options_for(tol)).y);
}

double AngularSolution::theta(double t) const {
  if (t <= 0.0) return omega0;
  if (t >= t_end || dense.empty()) return theta_end;
  return dense(t)[0];
}

double AngularSolution::r(double t) const {
  if (t <= 0.0) return 1.0;
  if (t >= t_end || dense.empty()) return std::exp(log_r_end);
  return std::exp(dense(t)[1]);
}

double AngularSolution::r_end() const { return std::exp(log_r_end); }

AngularSolution angle_lift(const CoeffPath& S, double omega, double t_end, double tol, bool keep_dense) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  AngularSolution sol;
  sol.omega0 = omega;
  sol.t_end = t_end;
  auto rhs = [&S](double t, const State<2>& y) {
    double a, b, c;
    S.eval(t, a, b, c);
    const double cs = std::cos(y[0]), sn = std::sin(y[0]);
    return State<2>{a * cs * cs + c * sn * sn - 2.0 * b * sn * cs, b * (cs * cs - sn * sn) + (a - c) * sn * cs};
  };
  const auto res = dop853_integrate<2>(rhs, 0.0, State<2>{omega, 0.0}, t_end, options_for(tol),
                                       keep_dense ? &sol.dense : nullptr);
  sol.theta_end = res.y[0];
  sol.log_r_end = res.y[1];
  return sol;
}

double winding(const CoeffPath& S, int k, double omega, double tol) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const AngularSolution a = angle_lift(S, omega, k * S.T, tol, false);
  return (a.theta_end - omega) / (2.0 * std::numbers::pi);
}

double winding_derivative(const CoeffPath& S, double omega, double tol, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  const AngularSolution a = angle_lift(S, omega, k * S.T, tol, false);
  return (std::exp(-2.0 * a.log_r_end) - 1.0) / (2.0 * std::numbers::pi);
}

}  // namespace hamrot
