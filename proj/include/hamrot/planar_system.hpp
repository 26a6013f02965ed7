#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "hamrot/coeff_path.hpp"
#include "hamrot/sp1.hpp"

namespace hamrot {

// Nonlinear T-periodic planar Hamiltonian system J z' = grad H(t, z),
// stored through its right-hand side z' = -J grad H(t, z).
struct PlanarSystem {
  std::string name;
  double T = 1.0;
  std::function<Vec2(double, const Vec2&)> field;
  CoeffPath S0;                    // linearization at the origin
  std::optional<CoeffPath> Sinf;   // linearization at infinity, if any
  bool sublinear_at_infinity = false;
  // Trajectories leaving this ball raise BlowUp.
  double safety_radius = 1e12;
};

// Linear system z' = -J S(t) z wrapped as a PlanarSystem (S0 = Sinf = S).
PlanarSystem embed_linear(const CoeffPath& S, const std::string& name = "linear");

// Checks field(t, 0) = 0 at sampled times and the linearization error on a
// small circle; throws InvalidArgument on failure.
void validate_planar_system(const PlanarSystem& sys, int samples = 100);

}  // namespace hamrot
