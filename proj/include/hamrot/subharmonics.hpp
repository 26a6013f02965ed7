#pragma once

#include <optional>
#include <vector>

#include "hamrot/index_theory.hpp"
#include "hamrot/linear_flow.hpp"
#include "hamrot/planar_system.hpp"

namespace hamrot {

struct SubharmonicCandidate {
  int k = 1;
  long j = 0;
  bool coprime = false;
  bool nodal_certified = false;
};

// Open gap strictly between two disjoint intervals; GapUncertified otherwise.
Interval rotation_gap(const Interval& rho0, const Interval& rhoinf);

std::vector<SubharmonicCandidate> candidates(const Interval& rho0, const Interval& rhoinf, int k);

struct KStarScan {
  int k_star = 0;
  int horizon = 0;
  std::vector<int> counts;        // counts[k - 1]
  // Euler-phi count phi(floor(k (rho - l))) from the nodal discussion, -1
  // where no integer l separates the two rotation numbers.
  std::vector<long> euler_phi_estimate;
};

KStarScan k_star_scan(const Interval& rho0, const Interval& rhoinf, int horizon);

long euler_phi(long n);

struct PoincareResult {
  Vec2 z{};
  double rot = 0.0;  // lifted clockwise winding over [0, kT]
};

// Flow over [0, kT]; rot is only meaningful for z0 != 0.
PoincareResult poincare_map(const PlanarSystem& sys, int k, const Vec2& z0, double tol = kDefaultTol);

struct OrbitSample {
  double t, x, y;
};

struct OrbitResult {
  Vec2 z0{};
  double residual = 0.0;
  long winding = 0;
  double rot = 0.0;
  bool minimal_period = false;
  std::vector<OrbitSample> orbit_samples;
};

// Dense samples of the trajectory from z0 over [0, kT].
std::vector<OrbitSample> sample_orbit(const PlanarSystem& sys, int k, const Vec2& z0, int per_period = 64,
                                      double tol = kDefaultTol);

struct TwistOptions {
  int grid_m = 64;             // points per circle
  int per_decade = 4;          // ladder density
  double tol = kDefaultTol;    // integration tolerance
};

struct TwistRadii {
  double r_hat = 0.0;    // inner circle
  double r_check = 0.0;  // outer circle
  bool inner_above = true;  // Rot_k > j on the inner circle
  double inner_extreme = 0.0, outer_extreme = 0.0;
};

Interval rotation_at_zero(const PlanarSystem& sys, int K = 200);
Interval rotation_at_infinity(const PlanarSystem& sys, int K = 200);

TwistRadii twist_radii(const PlanarSystem& sys, int k, long j, int grid_m = 64, const TwistOptions& opt = {});

struct OrbitSearchOptions {
  int n_radii = 32;
  int n_angles = 64;
  int max_newton = 50;
  double merge_tol = 1e-6;
  double int_tol = kDefaultTol;  // integration tolerance inside the search
  unsigned workers = 0;
};

std::vector<OrbitResult> find_orbits(const PlanarSystem& sys, int k, long j, double r_hat, double r_check,
                                     double tol = 1e-8, const OrbitSearchOptions& opt = {});

// max over the circle of |Rot_k| stays below 1 - margin.
bool verify_hsub(const PlanarSystem& sys, int k, double R, int grid_m = 64, double margin = 1e-6,
                 double tol = kDefaultTol);

// First outer ladder radius where verify_hsub holds; TwistNotFound otherwise.
double hsub_radius(const PlanarSystem& sys, int k, int grid_m = 64, const TwistOptions& opt = {});

// Radii used by the twist search, in search order.
std::vector<double> inner_ladder(int per_decade = 4);
std::vector<double> outer_ladder(int per_decade = 4);

// Smallest l in [0, k) such that the orbit points z(lT) and w agree
// within tol, or -1.
int time_shift_match(const PlanarSystem& sys, int k, const Vec2& z, const Vec2& w, double tol,
                     double int_tol = kDefaultTol);

}  // namespace hamrot
