#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamrot/coeff_path.hpp"
#include "hamrot/hill_spectrum.hpp"
#include "hamrot/index_theory.hpp"
#include "hamrot/planar_system.hpp"

namespace hamrot {

enum class SystemKind { linear, nonlinear };

struct CatalogEntry {
  std::string name;
  SystemKind kind;
  std::vector<std::pair<std::string, double>> defaults;  // parameter, default
  std::string description;
};

const std::vector<CatalogEntry>& catalog_entries();

// Parsed "name key=value, key=value" string. Values accept plain numbers and
// simple multiples/fractions of pi ("2pi", "pi/2", "5*pi/2").
struct SystemSpec {
  std::string name;
  std::map<std::string, double> params;
};

double parse_number(const std::string& text);
SystemSpec parse_system_spec(const std::string& text);

struct BuiltSystem {
  SystemKind kind = SystemKind::linear;
  std::string name;
  std::map<std::string, double> params;  // with defaults filled in
  CoeffPath linear;                      // the system itself, or S0 when nonlinear
  std::optional<PlanarSystem> nonlinear;
  std::optional<HillProblem> hill;       // set for Hill-type entries
};

// Unknown names or parameters raise InvalidArgument.
BuiltSystem build_system(const SystemSpec& spec);
BuiltSystem build_system(const std::string& text);

// Linear constructors.
CoeffPath make_hill(const PeriodicFunction& q, double T);

// Lotka-Volterra system in logarithmic coordinates around the coexistence
// state: x' = beta(t)(e^y - 1), y' = alpha(t)(1 - e^x).
struct LotkaVolterraSystem {
  PlanarSystem system;
  Interval rho0;  // certified rotation interval of the linearization, lo > 0
};
LotkaVolterraSystem make_lotka_volterra_log(const PeriodicFunction& alpha, const PeriodicFunction& beta, double T);

// u'' + q0(t) u / (1 + u^2) = 0.
PlanarSystem make_saturating_scalar(const PeriodicFunction& q0, double T);

// Scalar nonlinearity f(t, u) with its u-derivative.
struct ScalarNonlinearity {
  std::function<double(double, double)> f;
  std::function<double(double, double)> df_du;
};

// (phi_a(u'))' + f(t, u) = 0 with phi_a(s) = s / sqrt(1 - (s/a)^2), written
// around the T-periodic solution ubar and truncated at
// L = |ubar|_inf + 2 a T.
PlanarSystem make_minkowski(const ScalarNonlinearity& f, double a, const PeriodicFunction& ubar, double T);

double minkowski_phi(double s, double a);
double minkowski_phi_inverse(double v, double a);

}  // namespace hamrot
