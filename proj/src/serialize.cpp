#include "hamrot/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hamrot/errors.hpp"

namespace hamrot {

namespace {

Json function_to_json(const PeriodicFunction& f) {
  Json out = Json::object();
  if (f.kind() == PeriodicFunction::Kind::sampled) {
    std::vector<double> s = f.samples();
    for (double& v : s) v += f.offset();
    out["samples"] = s;
    return out;
  }
  out["cos"] = f.cos_coeffs();
  out["sin"] = f.sin_coeffs();
  return out;
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw Error(ErrorKind::InvalidArgument, "unknown field '" + it.key() + "' in " + where);
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PeriodicFunction function_from_json(const Json& j, double T, const std::string& name) {
  if (j.is_number()) return PeriodicFunction::constant(j.get<double>()).with_period(T);
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "field '" + name + "' must be a number or an object");
  reject_unknown(j, {"cos", "sin", "samples"}, "'" + name + "'");
  if (j.contains("samples")) {
    if (j.contains("cos") || j.contains("sin"))
      throw Error(ErrorKind::InvalidArgument, "'" + name + "' mixes samples with cos/sin");
    return PeriodicFunction::sampled(T, number_list(j["samples"], name + ".samples"));
  }
  std::vector<double> c = j.contains("cos") ? number_list(j["cos"], name + ".cos") : std::vector<double>{};
  std::vector<double> s = j.contains("sin") ? number_list(j["sin"], name + ".sin") : std::vector<double>{};
  if (c.empty()) c.push_back(0.0);
  return PeriodicFunction::trig(T, c, s);
}

}  // namespace

Json to_json(const Interval& v) { return Json::array({v.lo, v.hi}); }

Json to_json(const ClassLabel& v) {
  Json j;
  j["case"] = v.case_id;
  j["tag"] = v.name();
  j["ell"] = v.ell;
  return j;
}

Json to_json(const MultiplierPair& v) {
  Json j;
  j["class"] = to_string(v.cls);
  j["mu1"] = Json::array({v.mu1.real(), v.mu1.imag()});
  j["mu2"] = Json::array({v.mu2.real(), v.mu2.imag()});
  return j;
}

Json to_json(const WindingExtrema& v) {
  Json j;
  j["eta_minus"] = v.eta_minus;
  j["eta_plus"] = v.eta_plus;
  j["argmin"] = v.argmin;
  j["argmax"] = v.argmax;
  return j;
}

Json to_json(const IndexReport& v) {
  Json j;
  j["eta_minus"] = v.eta_minus;
  j["eta_plus"] = v.eta_plus;
  j["label"] = to_json(v.label);
  j["i_T"] = v.i_T;
  j["rho_interval"] = to_json(v.rho_interval);
  j["m"] = v.m;
  j["tau"] = v.tau;
  j["stability"] = to_string(v.stability);
  j["multipliers"] = to_json(v.multipliers);
  return j;
}

Json to_json(const IterationReport& v) {
  Json j;
  j["k"] = v.k;
  j["i_kT"] = v.i_kT;
  j["i_kT_bounds"] = Json::array({v.i_lo, v.i_hi});
  j["predicted_label_kT"] = to_json(v.predicted_label);
  j["from_formula"] = v.from_formula;
  j["p"] = v.p;
  j["q"] = v.q;
  j["predicted_class_kT"] = to_string(v.predicted_class);
  return j;
}

Json to_json(const SpectrumReport& v) {
  Json j;
  j["n_max"] = v.n_max;
  j["eigenvalues"] = v.eigenvalues;
  Json d = Json::array();
  for (bool b : v.is_double) d.push_back(b);
  j["is_double"] = d;
  j["indices_valid"] = v.indices_valid;
  if (v.indices_valid) {
    j["morse"] = v.morse;
    j["morse_plus"] = v.morse_plus;
  } else {
    j["morse"] = nullptr;
    j["morse_plus"] = nullptr;
  }
  j["cz"] = v.cz;
  return j;
}

Json to_json(const MorseIndices& v) {
  Json j;
  j["m_T"] = v.m_T;
  j["m_T_plus"] = v.m_T_plus;
  j["i_T"] = v.i_T;
  return j;
}

Json to_json(const SubharmonicCandidate& v) {
  Json j;
  j["k"] = v.k;
  j["j"] = v.j;
  j["coprime"] = v.coprime;
  j["nodal_certified"] = v.nodal_certified;
  return j;
}

Json to_json(const KStarScan& v) {
  Json j;
  j["k_star"] = v.k_star;
  j["horizon"] = v.horizon;
  j["counts"] = v.counts;
  j["euler_phi_estimate"] = v.euler_phi_estimate;
  return j;
}

Json to_json(const TwistRadii& v) {
  Json j;
  j["r_hat"] = v.r_hat;
  j["r_check"] = v.r_check;
  j["inner_above"] = v.inner_above;
  j["inner_extreme"] = v.inner_extreme;
  j["outer_extreme"] = v.outer_extreme;
  return j;
}

Json to_json(const OrbitResult& v) {
  Json j;
  j["z0"] = Json::array({v.z0[0], v.z0[1]});
  j["residual"] = v.residual;
  j["winding"] = v.winding;
  j["rot"] = v.rot;
  j["minimal_period"] = v.minimal_period;
  return j;
}

Json coeffpath_to_json(const CoeffPath& S) {
  Json j;
  j["T"] = S.T;
  j["a"] = function_to_json(S.a);
  j["b"] = function_to_json(S.b);
  j["c"] = function_to_json(S.c);
  return j;
}

CoeffPath coeffpath_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "coefficient config must be an object");
  reject_unknown(j, {"T", "a", "b", "c"}, "coefficient config");
  for (const char* key : {"T", "a", "b", "c"})
    if (!j.contains(key)) throw Error(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
  if (!j["T"].is_number()) throw Error(ErrorKind::InvalidArgument, "T must be a number");
  const double T = j["T"].get<double>();
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  return CoeffPath(T, function_from_json(j["a"], T, "a"), function_from_json(j["b"], T, "b"),
                   function_from_json(j["c"], T, "c"));
}

CoeffPath load_coeffpath(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "malformed config '" + path + "': " + e.what());
  }
  return coeffpath_from_json(j);
}

}  // namespace hamrot
