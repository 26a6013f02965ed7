#include "hamrot/coeff_path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hamrot/errors.hpp"

namespace hamrot {

namespace {

double reduce(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace

PeriodicFunction PeriodicFunction::constant(double value) { return trig(1.0, {value}, {}); }

PeriodicFunction PeriodicFunction::trig(double period, std::vector<double> cos_coeffs,
                                        std::vector<double> sin_coeffs) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(ErrorKind::InvalidArgument, "period must be positive");
  PeriodicFunction f;
  f.kind_ = Kind::trig;
  f.period_ = period;
  f.cos_ = std::move(cos_coeffs);
  f.sin_ = std::move(sin_coeffs);
  if (f.cos_.empty()) f.cos_.push_back(0.0);
  if (f.sin_.size() > f.cos_.size()) f.cos_.resize(f.sin_.size(), 0.0);
  f.sin_.resize(f.cos_.size(), 0.0);
  f.sin_[0] = 0.0;
  for (double v : f.cos_)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
  for (double v : f.sin_)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
  return f;
}

PeriodicFunction PeriodicFunction::sampled(double period, std::vector<double> samples) {
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (samples.size() < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 samples");
  for (double v : samples)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite sample");
  PeriodicFunction f;
  f.kind_ = Kind::sampled;
  f.period_ = period;
  f.samples_ = std::move(samples);
  f.cos_ = {0.0};
  f.sin_ = {0.0};
  return f;
}

bool PeriodicFunction::is_constant() const {
  if (kind_ == Kind::sampled) return false;
  for (std::size_t n = 1; n < cos_.size(); ++n)
    if (cos_[n] != 0.0 || sin_[n] != 0.0) return false;
  return true;
}

PeriodicFunction PeriodicFunction::shifted(double c) const {
  PeriodicFunction f = *this;
  if (kind_ == Kind::trig)
    f.cos_[0] += c;
  else
    f.offset_ += c;
  return f;
}

PeriodicFunction PeriodicFunction::scaled(double s) const {
  PeriodicFunction f = *this;
  for (double& v : f.cos_) v *= s;
  for (double& v : f.sin_) v *= s;
  for (double& v : f.samples_) v *= s;
  f.offset_ *= s;
  return f;
}

double PeriodicFunction::sup_bound() const {
  if (kind_ == Kind::trig) {
    double s = std::abs(cos_[0]);
    for (std::size_t n = 1; n < cos_.size(); ++n) s += std::hypot(cos_[n], sin_[n]);
    return s;
  }
  // Catmull-Rom overshoots the samples by at most a quarter of the local jump.
  double m = 0.0, jump = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    m = std::max(m, std::abs(samples_[i]));
    jump = std::max(jump, std::abs(samples_[(i + 1) % samples_.size()] - samples_[i]));
  }
  return m + 0.25 * jump + std::abs(offset_);
}

PeriodicFunction PeriodicFunction::with_period(double period) const {
  if (std::abs(period - period_) <= 1e-12 * period) return *this;
  if (!is_constant())
    throw Error(ErrorKind::InvalidArgument, "coefficient period does not match path period");
  return trig(period, {cos_[0]}, {});
}

double PeriodicFunction::eval_trig(double c1, double s1) const {
  double v = cos_[0];
  double cn = 1.0, sn = 0.0;
  for (std::size_t n = 1; n < cos_.size(); ++n) {
    const double cn1 = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cn1;
    v += cos_[n] * cn + sin_[n] * sn;
  }
  return v;
}

double PeriodicFunction::eval_sampled(double tr) const {
  const std::size_t n = samples_.size();
  const double x = tr / period_ * static_cast<double>(n);
  double fl = std::floor(x);
  double u = x - fl;
  std::size_t i1 = static_cast<std::size_t>(fl) % n;
  const std::size_t i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
  const double p0 = samples_[i0], p1 = samples_[i1], p2 = samples_[i2], p3 = samples_[i3];
  const double v = p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                                   u * (3.0 * (p1 - p2) + p3 - p0)));
  return v + offset_;
}

double PeriodicFunction::operator()(double t) const {
  const double tr = reduce(t, period_);
  if (kind_ == Kind::sampled) return eval_sampled(tr);
  if (cos_.size() == 1) return cos_[0];
  const double w = 2.0 * std::numbers::pi * tr / period_;
  return eval_trig(std::cos(w), std::sin(w));
}

double PeriodicFunction::derivative(double t) const {
  if (kind_ == Kind::trig) return derivative_function()(t);
  const std::size_t n = samples_.size();
  const double tr = reduce(t, period_);
  const double x = tr / period_ * static_cast<double>(n);
  const double fl = std::floor(x);
  const double u = x - fl;
  const std::size_t i1 = static_cast<std::size_t>(fl) % n;
  const std::size_t i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
  const double p0 = samples_[i0], p1 = samples_[i1], p2 = samples_[i2], p3 = samples_[i3];
  const double dv = 0.5 * (p2 - p0) + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                    1.5 * u * u * (3.0 * (p1 - p2) + p3 - p0);
  return dv * static_cast<double>(n) / period_;
}

PeriodicFunction PeriodicFunction::derivative_function() const {
  if (kind_ != Kind::trig) throw Error(ErrorKind::InvalidArgument, "derivative_function needs a trig polynomial");
  const double w = 2.0 * std::numbers::pi / period_;
  std::vector<double> dc(cos_.size(), 0.0), ds(sin_.size(), 0.0);
  for (std::size_t n = 1; n < cos_.size(); ++n) {
    dc[n] = n * w * sin_[n];
    ds[n] = -(n * w * cos_[n]);
  }
  return trig(period_, dc, ds);
}

CoeffPath::CoeffPath(double period, PeriodicFunction a_, PeriodicFunction b_, PeriodicFunction c_)
    : T(period), a(a_.with_period(period)), b(b_.with_period(period)), c(c_.with_period(period)) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  all_trig_ = a.kind() == PeriodicFunction::Kind::trig && b.kind() == PeriodicFunction::Kind::trig &&
              c.kind() == PeriodicFunction::Kind::trig;
  all_constant_ = a.is_constant() && b.is_constant() && c.is_constant();
}

CoeffPath CoeffPath::constant(double a, double b, double c, double period) {
  return CoeffPath(period, PeriodicFunction::trig(period, {a}), PeriodicFunction::trig(period, {b}),
                   PeriodicFunction::trig(period, {c}));
}

void CoeffPath::eval(double t, double& av, double& bv, double& cv) const {
  if (all_constant_) {
    av = a.cos_coeffs()[0];
    bv = b.cos_coeffs()[0];
    cv = c.cos_coeffs()[0];
    return;
  }
  if (!all_trig_) {
    av = a(t);
    bv = b(t);
    cv = c(t);
    return;
  }
  const double tr = reduce(t, T);
  const double w = 2.0 * std::numbers::pi * tr / T;
  const double c1 = std::cos(w), s1 = std::sin(w);
  av = a.eval_trig(c1, s1);
  bv = b.eval_trig(c1, s1);
  cv = c.eval_trig(c1, s1);
}

Mat2 CoeffPath::S(double t) const {
  double av, bv, cv;
  eval(t, av, bv, cv);
  return {av, bv, bv, cv};
}

}  // namespace hamrot
