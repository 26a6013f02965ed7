#include "hamrot/hill_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hamrot/errors.hpp"
#include "hamrot/index_theory.hpp"

namespace hamrot {

namespace {

struct Probe {
  double lambda;
  double eta_minus, eta_plus;
};

class Prober {
 public:
  Prober(const HillProblem& p, const HillOptions& opt) : p_(p), opt_(opt) {}

  Probe operator()(double lambda) const {
    const WindingExtrema e = winding_extrema(hill_to_coeffpath(p_, lambda), opt_.grid_n, 1e-10, 1, opt_.tol);
    return {lambda, e.eta_minus, e.eta_plus};
  }

 private:
  const HillProblem& p_;
  const HillOptions& opt_;
};

// rho < l
bool below(const Probe& pr, long l) { return pr.eta_plus < l - kSnapBand; }
// rho > l
bool above(const Probe& pr, long l) { return pr.eta_minus > l + kSnapBand; }

template <class Pred>
double bisect(const Prober& probe, double lo, double hi, Pred holds_at_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (holds_at_lo(probe(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CoeffPath hill_to_coeffpath(const HillProblem& p, double lambda) {
  return CoeffPath(p.T, p.q.shifted(lambda), PeriodicFunction::constant(0.0), PeriodicFunction::constant(1.0));
}

SpectrumReport periodic_eigenvalues(const HillProblem& p, int n_max, double tol, const HillOptions& opt) {
  if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be non-negative");
  if (opt.sweep_n < 2) throw Error(ErrorKind::InvalidArgument, "sweep_n must be at least 2");
  const Prober probe(p, opt);
  const double qn = p.q.sup_bound();
  const double top = 2.0 * std::numbers::pi * (n_max + 1) / p.T;
  const double lam_lo = -qn - 1.0, lam_hi = top * top + qn + 1.0;

  std::vector<Probe> sweep;
  sweep.reserve(opt.sweep_n);
  for (int i = 0; i < opt.sweep_n; ++i)
    sweep.push_back(probe(lam_lo + (lam_hi - lam_lo) * i / (opt.sweep_n - 1)));
  // rho(lambda) is nondecreasing and sits inside [eta-, eta+]; a later
  // sample whose enclosure lies wholly below an earlier one contradicts that.
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    if (sweep[i + 1].eta_plus < sweep[i].eta_minus - kSnapBand) {
      std::ostringstream os;
      os << "rotation number decreases between lambda = " << sweep[i].lambda << " and " << sweep[i + 1].lambda;
      throw Error(ErrorKind::InconsistentClassification, os.str());
    }
  }

  // First sweep index where pred fails, with pred holding just before it.
  auto bracket = [&](auto pred, long level, const char* what) {
    if (!pred(sweep.front())) {
      std::ostringstream os;
      os << "sweep window does not bracket the " << what << " end of level " << level;
      throw Error(ErrorKind::BracketNotFound, os.str());
    }
    for (std::size_t i = 1; i < sweep.size(); ++i)
      if (!pred(sweep[i])) return std::make_pair(sweep[i - 1].lambda, sweep[i].lambda);
    std::ostringstream os;
    os << "sweep window does not bracket the " << what << " end of level " << level;
    throw Error(ErrorKind::BracketNotFound, os.str());
  };

  SpectrumReport rep;
  rep.n_max = n_max;
  const double delta = std::max(10.0 * tol, 1e-8);
  for (long l = 0; l <= n_max; ++l) {
    auto not_above = [l](const Probe& pr) { return !above(pr, l); };
    if (l > 0) {
      auto is_below = [l](const Probe& pr) { return below(pr, l); };
      const auto [a, b] = bracket(is_below, l, "left");
      const double left = bisect(probe, a, b, is_below, tol);
      if (!below(probe(left - delta), l) || below(probe(left + delta), l))
        throw Error(ErrorKind::InconsistentClassification, "left eigenvalue failed post-verification");
      rep.eigenvalues.push_back(left);
    }
    const auto [a, b] = bracket(not_above, l, "right");
    const double right = bisect(probe, a, b, not_above, tol);
    if (above(probe(right - delta), l) || !above(probe(right + delta), l))
      throw Error(ErrorKind::InconsistentClassification, "right eigenvalue failed post-verification");
    rep.eigenvalues.push_back(right);
  }
  rep.is_double.assign(rep.eigenvalues.size(), false);
  for (std::size_t i = 1; i + 1 < rep.eigenvalues.size(); i += 2) {
    if (std::abs(rep.eigenvalues[i + 1] - rep.eigenvalues[i]) < opt.double_tol)
      rep.is_double[i] = rep.is_double[i + 1] = true;
  }

  if (rep.eigenvalues.back() > 1e-7) {
    const long i_T = cz_index(hill_to_coeffpath(p, 0.0));
    const MorseIndices m = morse_from_spectrum(rep.eigenvalues, i_T, 1e-7);
    rep.indices_valid = true;
    rep.morse = m.m_T;
    rep.morse_plus = m.m_T_plus;
    rep.cz = m.i_T;
  }
  return rep;
}

MorseIndices morse_from_spectrum(const std::vector<double>& ev, long i_T, double tol) {
  if (ev.empty() || !(ev.back() > tol))
    throw Error(ErrorKind::InsufficientSpectrum, "no computed eigenvalue lies above zero");
  MorseIndices m;
  m.i_T = i_T;
  for (double v : ev) {
    if (v < -tol) ++m.m_T;
    if (v <= tol) ++m.m_T_plus;
  }
  return m;
}

MorseIndices morse_indices(const HillProblem& p, double tol, const HillOptions& opt) {
  // Enough levels for (2 pi (n+1) / T)^2 to clear the potential.
  const double need = std::sqrt(std::max(0.0, p.q.sup_bound())) * p.T / (2.0 * std::numbers::pi);
  int n_max = std::max(1, static_cast<int>(std::ceil(need)));
  for (int attempt = 0; attempt < 6; ++attempt, n_max *= 2) {
    const SpectrumReport r = periodic_eigenvalues(p, n_max, 1e-10, opt);
    if (r.eigenvalues.back() > tol) return morse_from_spectrum(r.eigenvalues, cz_index(hill_to_coeffpath(p, 0.0)), tol);
  }
  throw Error(ErrorKind::InsufficientSpectrum, "spectrum did not reach above zero");
}

}  // namespace hamrot
