#pragma once

#include <vector>

#include "hamrot/coeff_path.hpp"
#include "hamrot/linear_flow.hpp"

namespace hamrot {

// u'' + (lambda + q(t)) u = 0 on a period T.
struct HillProblem {
  PeriodicFunction q;
  double T = 1.0;
};

CoeffPath hill_to_coeffpath(const HillProblem& p, double lambda);

struct HillOptions {
  int sweep_n = 128;          // samples of the initial lambda sweep
  int grid_n = 32;            // omega grid inside each predicate evaluation
  double tol = kDefaultTol;   // integration tolerance
  double double_tol = 1e-7;   // endpoints closer than this form a double eigenvalue
};

struct SpectrumReport {
  int n_max = 0;
  std::vector<double> eigenvalues;  // lambda_0 ... lambda_{2 n_max}
  std::vector<bool> is_double;      // per eigenvalue
  bool indices_valid = false;       // spectrum reaches above zero
  int morse = 0;
  int morse_plus = 0;
  long cz = 0;
};

struct MorseIndices {
  int m_T = 0;
  int m_T_plus = 0;
  long i_T = 0;
};

// Periodic eigenvalues up to level n_max, located to within tol in lambda.
SpectrumReport periodic_eigenvalues(const HillProblem& p, int n_max, double tol = 1e-10,
                                    const HillOptions& opt = {});

// Counts from a computed spectrum; InsufficientSpectrum unless the top
// eigenvalue lies above tol.
MorseIndices morse_from_spectrum(const std::vector<double>& eigenvalues, long i_T, double tol = 1e-7);

// Grows n_max until the spectrum reaches above zero.
MorseIndices morse_indices(const HillProblem& p, double tol = 1e-7, const HillOptions& opt = {});

}  // namespace hamrot
