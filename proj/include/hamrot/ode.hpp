#pragma once

// Adaptive Dormand-Prince 8(5,3) integrator with 7th-order dense output,
// templated on a fixed-size state. Step-size control follows Hairer's
// DOP853 (and the scipy port of it).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "hamrot/dop853_tableau.hpp"
#include "hamrot/errors.hpp"

namespace hamrot {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

template <std::size_t N>
class DenseOutput {
 public:
  struct Segment {
    double t0, h;
    State<N> y0;
    std::array<State<N>, dop853::kInterpolatorPower> F;
  };

  bool empty() const { return seg_.empty(); }
  double t_begin() const { return seg_.front().t0; }
  double t_end() const { return seg_.back().t0 + seg_.back().h; }
  std::size_t size() const { return seg_.size(); }
  const Segment& segment(std::size_t i) const { return seg_[i]; }

  // Step nodes, including both ends.
  std::vector<double> nodes() const {
    std::vector<double> t;
    t.reserve(seg_.size() + 1);
    for (const auto& s : seg_) t.push_back(s.t0);
    if (!seg_.empty()) t.push_back(t_end());
    return t;
  }

  State<N> operator()(double t) const {
    auto it = std::upper_bound(seg_.begin(), seg_.end(), t,
                               [](double v, const Segment& s) { return v < s.t0; });
    const Segment& s = it == seg_.begin() ? seg_.front() : *(it - 1);
    return eval(s, t);
  }

  static State<N> eval(const Segment& s, double t) {
    const double x = (t - s.t0) / s.h;
    State<N> y{};
    for (int i = 0; i < dop853::kInterpolatorPower; ++i) {
      const auto& f = s.F[dop853::kInterpolatorPower - 1 - i];
      const double mul = (i % 2 == 0) ? x : 1.0 - x;
      for (std::size_t k = 0; k < N; ++k) y[k] = (y[k] + f[k]) * mul;
    }
    for (std::size_t k = 0; k < N; ++k) y[k] += s.y0[k];
    return y;
  }

  void push(Segment s) { seg_.push_back(std::move(s)); }
  void clear() { seg_.clear(); }

 private:
  std::vector<Segment> seg_;
};

template <std::size_t N>
struct OdeResult {
  double t = 0.0;
  State<N> y{};
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t nfev = 0;
};

struct NoObserver {
  template <class S>
  void operator()(double, const S&) const {}
};

namespace detail {

template <std::size_t N>
double rms_scaled(const State<N>& v, const State<N>& scale) {
  double s = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double q = v[k] / scale[k];
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(N));
}

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 > t0. The observer is called with
// every accepted (t, y) and may throw to abort.
template <std::size_t N, class Rhs, class Observer = NoObserver>
OdeResult<N> dop853_integrate(Rhs&& f, double t0, const State<N>& y0, double t1,
                              const OdeOptions& opt, DenseOutput<N>* dense = nullptr,
                              Observer&& observe = Observer{}) {
  using namespace dop853;
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kExponent = -1.0 / 8.0;

  OdeResult<N> res;
  res.t = t0;
  res.y = y0;
  if (dense) dense->clear();
  if (!(t1 > t0)) return res;

  State<N> y = y0;
  double t = t0;
  State<N> fy = f(t, y);
  ++res.nfev;

  auto scale_of = [&](const State<N>& a, const State<N>& b) {
    State<N> s;
    for (std::size_t k = 0; k < N; ++k)
      s[k] = opt.atol + std::max(std::abs(a[k]), std::abs(b[k])) * opt.rtol;
    return s;
  };

  // Initial step (Hairer's heuristic for an order-7 error estimator).
  double h_abs;
  {
    const State<N> sc = scale_of(y, y);
    const double d0 = detail::rms_scaled(y, sc), d1 = detail::rms_scaled(fy, sc);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    State<N> y1;
    for (std::size_t k = 0; k < N; ++k) y1[k] = y[k] + h0 * fy[k];
    const State<N> f1 = f(t + h0, y1);
    ++res.nfev;
    State<N> df;
    for (std::size_t k = 0; k < N; ++k) df[k] = f1[k] - fy[k];
    const double d2 = detail::rms_scaled(df, sc) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                   : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    h_abs = std::min({100.0 * h0, h1, opt.max_step, t1 - t0});
  }

  std::array<State<N>, kStagesExtended> K;
  while (t < t1) {
    if (res.steps >= opt.max_steps) {
      std::ostringstream os;
      os << "step budget exhausted at t = " << t;
      throw Error(ErrorKind::ToleranceNotMet, os.str());
    }
    const double min_step = 10.0 * std::abs(std::nextafter(t, t1) - t);
    h_abs = std::min(h_abs, opt.max_step);
    if (h_abs < min_step) h_abs = min_step;

    bool accepted = false, rejected = false;
    State<N> y_new, f_new;
    double h = 0.0, t_new = t;
    while (!accepted) {
      if (h_abs < min_step) {
        std::ostringstream os;
        os << "step size underflow at t = " << t;
        throw Error(ErrorKind::ToleranceNotMet, os.str());
      }
      t_new = t + h_abs;
      if (t_new > t1) t_new = t1;
      h = t_new - t;
      h_abs = h;

      K[0] = fy;
      for (int s = 1; s < kStages; ++s) {
        State<N> ys = y;
        for (int r = 0; r < s; ++r) {
          const double a = A[s][r] * h;
          if (a == 0.0) continue;
          for (std::size_t k = 0; k < N; ++k) ys[k] += a * K[r][k];
        }
        K[s] = f(t + C[s] * h, ys);
      }
      y_new = y;
      for (int s = 0; s < kStages; ++s) {
        const double bh = B[s] * h;
        if (bh == 0.0) continue;
        for (std::size_t k = 0; k < N; ++k) y_new[k] += bh * K[s][k];
      }
      f_new = f(t_new, y_new);
      K[kStages] = f_new;
      res.nfev += kStages;

      const State<N> sc = scale_of(y, y_new);
      double e5 = 0.0, e3 = 0.0;
      for (std::size_t k = 0; k < N; ++k) {
        double s5 = 0.0, s3 = 0.0;
        for (int s = 0; s <= kStages; ++s) {
          s5 += E5[s] * K[s][k];
          s3 += E3[s] * K[s][k];
        }
        s5 /= sc[k];
        s3 /= sc[k];
        e5 += s5 * s5;
        e3 += s3 * s3;
      }
      double err;
      if (e5 == 0.0 && e3 == 0.0) {
        err = 0.0;
      } else {
        err = h * e5 / std::sqrt((e5 + 0.01 * e3) * static_cast<double>(N));
      }
      if (err < 1.0) {
        double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kExponent));
        if (rejected) factor = std::min(1.0, factor);
        h_abs *= factor;
        accepted = true;
      } else {
        // NaN lands here as well and simply shrinks the step.
        const double shrink = std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, kExponent))
                                                 : kMinFactor;
        h_abs *= shrink;
        rejected = true;
        ++res.rejected;
      }
    }

    if (dense) {
      typename DenseOutput<N>::Segment seg;
      seg.t0 = t;
      seg.h = h;
      seg.y0 = y;
      for (int s = kStages + 1; s < kStagesExtended; ++s) {
        State<N> ys = y;
        for (int r = 0; r < s; ++r) {
          const double a = A[s][r] * h;
          if (a == 0.0) continue;
          for (std::size_t k = 0; k < N; ++k) ys[k] += a * K[r][k];
        }
        K[s] = f(t + C[s] * h, ys);
      }
      res.nfev += kStagesExtended - kStages - 1;
      for (std::size_t k = 0; k < N; ++k) {
        const double dy = y_new[k] - y[k];
        seg.F[0][k] = dy;
        seg.F[1][k] = h * fy[k] - dy;
        seg.F[2][k] = 2.0 * dy - h * (f_new[k] + fy[k]);
      }
      for (int r = 0; r < kInterpolatorPower - 3; ++r) {
        for (std::size_t k = 0; k < N; ++k) {
          double acc = 0.0;
          for (int s = 0; s < kStagesExtended; ++s) acc += D[r][s] * K[s][k];
          seg.F[3 + r][k] = h * acc;
        }
      }
      dense->push(std::move(seg));
    }

    t = t_new;
    y = y_new;
    fy = f_new;
    ++res.steps;
    observe(t, y);
  }
  res.t = t;
  res.y = y;
  return res;
}

}  // namespace hamrot
