#include "hamrot/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hamrot/catalog.hpp"
#include "hamrot/errors.hpp"
#include "hamrot/parallel.hpp"

namespace hamrot {

namespace {

const std::set<std::string> kCommands{"classify", "index", "rotation", "iterate", "spectrum", "plan", "hunt", "sweep"};

struct Output {
  std::vector<Json> records;   // json-lines body
  std::vector<Json> csv_rows;  // csv body; records when empty
  std::vector<Json> csv_notes; // summary lines written as comments in csv
};

struct LoadedSystem {
  std::string source;  // "catalog" or "file"
  std::optional<BuiltSystem> built;
  CoeffPath linear;
};

bool looks_like_file(const std::string& s) {
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return true;
  std::error_code ec;
  return s.find(' ') == std::string::npos && s.find('=') == std::string::npos &&
         std::filesystem::is_regular_file(s, ec);
}

LoadedSystem load_system(const std::string& spec) {
  LoadedSystem out;
  if (looks_like_file(spec)) {
    out.source = "file";
    out.linear = load_coeffpath(spec);
  } else {
    out.source = "catalog";
    out.built = build_system(spec);
    out.linear = out.built->linear;
  }
  return out;
}

const PlanarSystem& require_nonlinear(const LoadedSystem& s, const std::string& command) {
  if (!s.built || !s.built->nonlinear)
    throw Error(ErrorKind::InvalidArgument, "'" + command + "' needs a nonlinear catalog system");
  return *s.built->nonlinear;
}

IndexOptions index_options(const RunConfig& c) {
  IndexOptions o;
  o.tol = c.tol;
  o.grid_n = c.grid;
  return o;
}

Json classify_record(const CoeffPath& S, const RunConfig& c) {
  const IndexOptions opt = index_options(c);
  const WindingExtrema w = winding_extrema(S, opt.grid_n, opt.refine_tol, 1, opt.tol);
  const ClassLabel label = classify(S, 1, opt);
  Json j;
  j["record"] = "classify";
  j["label"] = to_json(label);
  j["i_T"] = index_of(label);
  j["eta_minus"] = w.eta_minus;
  j["eta_plus"] = w.eta_plus;
  j["stability"] = to_string(stability_of(label));
  j["multipliers"] = to_json(multipliers(monodromy(S, S.T, opt.tol)));
  return j;
}

Json rotation_record(const CoeffPath& S, const RunConfig& c) {
  const Interval rho = rotation_number(S, c.K, index_options(c));
  Json j;
  j["record"] = "rotation";
  j["K"] = c.K;
  j["rho_interval"] = to_json(rho);
  j["m"] = 2.0 * rho.mid();
  return j;
}

struct SweepAxis {
  std::string name;
  double lo, hi;
  int n;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::InvalidArgument, "sweep must read name=lo:hi:n");
  SweepAxis a;
  a.name = text.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(eq + 1));
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "sweep must read name=lo:hi:n");
  a.lo = parse_number(parts[0]);
  a.hi = parse_number(parts[1]);
  const double n = parse_number(parts[2]);
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || n < 1 || n != std::floor(n))
    throw Error(ErrorKind::InvalidArgument, "sweep range must be finite with a positive integer count");
  a.n = static_cast<int>(n);
  return a;
}

Json error_json(const Error& e) {
  Json j;
  j["error"] = to_string(e.kind());
  j["message"] = e.what();
  return j;
}

Output run_sweep(const RunConfig& c) {
  if (c.sweep.empty() || c.sweep.size() > 2)
    throw Error(ErrorKind::InvalidArgument, "sweep needs one or two --sweep ranges");
  if (c.sweep_command != "classify" && c.sweep_command != "rotation")
    throw Error(ErrorKind::InvalidArgument, "--sweep-command must be classify or rotation");
  if (looks_like_file(c.system)) throw Error(ErrorKind::InvalidArgument, "sweep needs a catalog system");
  const SystemSpec base = parse_system_spec(c.system);
  std::vector<SweepAxis> axes;
  for (const auto& s : c.sweep) axes.push_back(parse_axis(s));
  if (axes.size() == 2 && axes[0].name == axes[1].name)
    throw Error(ErrorKind::InvalidArgument, "the two sweep parameters must differ");
  // Validates the names before fanning out.
  (void)build_system(base);
  {
    const auto& entries = catalog_entries();
    const auto e = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& x) { return x.name == base.name; });
    for (const auto& a : axes)
      if (std::none_of(e->defaults.begin(), e->defaults.end(), [&](const auto& d) { return d.first == a.name; }))
        throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + a.name + "' for " + base.name);
  }
  const int n0 = axes[0].n, n1 = axes.size() == 2 ? axes[1].n : 1;
  const std::size_t total = static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1);
  Output out;
  out.records = parallel_map<Json>(
      total,
      [&](std::size_t idx) {
        const int i0 = static_cast<int>(idx / n1), i1 = static_cast<int>(idx % n1);
        SystemSpec spec = base;
        Json point = Json::object();
        spec.params[axes[0].name] = axes[0].at(i0);
        point[axes[0].name] = axes[0].at(i0);
        if (axes.size() == 2) {
          spec.params[axes[1].name] = axes[1].at(i1);
          point[axes[1].name] = axes[1].at(i1);
        }
        Json rec;
        rec["record"] = "sweep_point";
        rec["index"] = Json::array({i0, i1});
        rec["params"] = point;
        try {
          const BuiltSystem b = build_system(spec);
          Json r = c.sweep_command == "classify" ? classify_record(b.linear, c) : rotation_record(b.linear, c);
          r.erase("record");
          for (auto it = r.begin(); it != r.end(); ++it) rec[it.key()] = it.value();
        } catch (const Error& e) {
          const Json ej = error_json(e);
          for (auto it = ej.begin(); it != ej.end(); ++it) rec[it.key()] = it.value();
        }
        return rec;
      },
      c.workers);
  return out;
}

Output run_plan(const PlanarSystem& sys, const RunConfig& c) {
  if (c.horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const Interval r0 = rotation_at_zero(sys, c.K), rinf = rotation_at_infinity(sys, c.K);
  const Interval gap = rotation_gap(r0, rinf);
  Output out;
  Json summary;
  summary["record"] = "plan";
  summary["rho0"] = to_json(r0);
  summary["rho_inf"] = to_json(rinf);
  summary["gap"] = to_json(gap);
  summary["k_star_scan"] = to_json(k_star_scan(r0, rinf, c.horizon));
  out.records.push_back(summary);
  out.csv_notes.push_back(summary);
  for (int k = 1; k <= c.horizon; ++k) {
    for (const auto& cand : candidates(r0, rinf, k)) {
      Json j = to_json(cand);
      out.csv_rows.push_back(j);
      Json r;
      r["record"] = "candidate";
      for (auto it = j.begin(); it != j.end(); ++it) r[it.key()] = it.value();
      out.records.push_back(r);
    }
  }
  return out;
}

Output run_hunt(const PlanarSystem& sys, const RunConfig& c) {
  if (!c.j) throw Error(ErrorKind::InvalidArgument, "hunt needs --j");
  TwistOptions topt;
  topt.grid_m = c.circle_grid;
  topt.tol = c.tol;
  const TwistRadii tr = twist_radii(sys, c.k, *c.j, c.circle_grid, topt);
  OrbitSearchOptions sopt;
  sopt.int_tol = c.tol;
  sopt.workers = c.workers;
  const auto orbits = find_orbits(sys, c.k, *c.j, tr.r_hat, tr.r_check, c.residual_tol, sopt);
  Output out;
  Json summary;
  summary["record"] = "hunt";
  summary["k"] = c.k;
  summary["j"] = *c.j;
  summary["twist"] = to_json(tr);
  summary["orbits_found"] = orbits.size();
  out.records.push_back(summary);
  out.csv_notes.push_back(summary);
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    Json r;
    r["record"] = "orbit";
    r["orbit"] = i;
    const Json o = to_json(orbits[i]);
    for (auto it = o.begin(); it != o.end(); ++it) r[it.key()] = it.value();
    Json samples = Json::array();
    for (const auto& s : orbits[i].orbit_samples) {
      samples.push_back(Json::array({s.t, s.x, s.y}));
      Json row;
      row["orbit"] = i;
      row["t"] = s.t;
      row["x"] = s.x;
      row["y"] = s.y;
      out.csv_rows.push_back(row);
    }
    r["samples"] = samples;
    out.records.push_back(r);
    Json note = o;
    note["orbit"] = i;
    out.csv_notes.push_back(note);
  }
  return out;
}

Output dispatch(const RunConfig& c) {
  if (c.command == "sweep") return run_sweep(c);
  const LoadedSystem sys = load_system(c.system);
  const CoeffPath& S = sys.linear;
  const IndexOptions opt = index_options(c);
  Output out;
  if (c.command == "classify") {
    out.records.push_back(classify_record(S, c));
  } else if (c.command == "index") {
    Json j;
    j["record"] = "index";
    const Json r = to_json(index_report(S, c.K, opt));
    for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
    out.records.push_back(j);
  } else if (c.command == "rotation") {
    out.records.push_back(rotation_record(S, c));
  } else if (c.command == "iterate") {
    Json j;
    j["record"] = "iterate";
    const Json r = to_json(iterate_index(S, c.k, opt));
    for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
    out.records.push_back(j);
  } else if (c.command == "spectrum") {
    if (!sys.built || !sys.built->hill)
      throw Error(ErrorKind::InvalidArgument, "spectrum needs a Hill-type catalog system");
    Json j;
    j["record"] = "spectrum";
    HillOptions hopt;
    hopt.tol = c.tol;
    const Json r = to_json(periodic_eigenvalues(*sys.built->hill, c.n_max, 1e-10, hopt));
    for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
    out.records.push_back(j);
  } else if (c.command == "plan") {
    return run_plan(require_nonlinear(sys, c.command), c);
  } else if (c.command == "hunt") {
    return run_hunt(require_nonlinear(sys, c.command), c);
  }
  if (sys.built && sys.built->nonlinear)
    for (auto& r : out.records) r["linearization"] = "S0";
  return out;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& cells) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), cells);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), cells);
  } else if (j.is_string()) {
    cells.emplace_back(prefix, j.get<std::string>());
  } else {
    cells.emplace_back(prefix, j.dump());
  }
}

void write_csv(const std::vector<Json>& rows, std::ostream& os) {
  std::vector<std::vector<std::pair<std::string, std::string>>> flat(rows.size());
  std::vector<std::string> columns;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    flatten(rows[i], "", flat[i]);
    for (const auto& [k, v] : flat[i])
      if (seen.insert(k).second) columns.push_back(k);
  }
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << quote(columns[i]);
  os << "\n";
  for (const auto& row : flat) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os << ",";
      for (const auto& [k, v] : row)
        if (k == columns[i]) {
          os << quote(v);
          break;
        }
    }
    os << "\n";
  }
}

Json header_record(const RunConfig& c) {
  Json h;
  h["record"] = "header";
  h["program"] = "hamrot";
  h["config"] = run_config_to_json(c);
  return h;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::GapUncertified: return kExitGapUncertified;
    case ErrorKind::TwistNotFound: return kExitTwistNotFound;
    case ErrorKind::NoOrbitFound: return kExitNoOrbitFound;
    case ErrorKind::NearDegenerate: return kExitNearDegenerate;
    case ErrorKind::InvalidArgument: return kExitUsage;
    default: return kExitFailure;
  }
}

Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["system"] = c.system;
  j["tol"] = c.tol;
  j["K"] = c.K;
  j["k"] = c.k;
  j["j"] = c.j ? Json(*c.j) : Json(nullptr);
  j["horizon"] = c.horizon;
  j["grid"] = c.grid;
  j["circle_grid"] = c.circle_grid;
  j["n_max"] = c.n_max;
  j["residual_tol"] = c.residual_tol;
  j["sweep"] = c.sweep;
  j["sweep_command"] = c.sweep_command;
  j["workers"] = c.workers;
  j["out"] = c.out;
  j["format"] = c.format;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "run config must be an object");
  static const std::set<std::string> allowed{"command", "system", "tol", "K", "k", "j", "horizon", "grid",
                                             "circle_grid", "n_max", "residual_tol", "sweep", "sweep_command",
                                             "workers", "out", "format"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw Error(ErrorKind::InvalidArgument, "unknown field '" + it.key() + "'");
  RunConfig c;
  try {
    if (j.contains("command")) c.command = j["command"].get<std::string>();
    if (j.contains("system")) c.system = j["system"].get<std::string>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("j") && !j["j"].is_null()) c.j = j["j"].get<long>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
    if (j.contains("grid")) c.grid = j["grid"].get<int>();
    if (j.contains("circle_grid")) c.circle_grid = j["circle_grid"].get<int>();
    if (j.contains("n_max")) c.n_max = j["n_max"].get<int>();
    if (j.contains("residual_tol")) c.residual_tol = j["residual_tol"].get<double>();
    if (j.contains("sweep")) c.sweep = j["sweep"].get<std::vector<std::string>>();
    if (j.contains("sweep_command")) c.sweep_command = j["sweep_command"].get<std::string>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad run config: ") + e.what());
  }
  return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (!kCommands.count(c.command)) throw Error(ErrorKind::InvalidArgument, "unknown command '" + c.command + "'");
    if (c.system.empty()) throw Error(ErrorKind::InvalidArgument, "--system is required");
    if (c.format != "json" && c.format != "csv") throw Error(ErrorKind::InvalidArgument, "format must be json or csv");
    if (!(c.tol > 0.0) || c.K < 1 || c.k < 1 || c.grid < 16 || c.circle_grid < 1 || c.n_max < 0 ||
        !(c.residual_tol > 0.0))
      throw Error(ErrorKind::InvalidArgument, "numeric option out of range");
    const Output o = dispatch(c);
    std::ofstream file;
    std::ostream* os = &out;
    if (!c.out.empty()) {
      file.open(c.out);
      if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + c.out + "'");
      os = &file;
    }
    if (c.format == "json") {
      *os << header_record(c).dump() << "\n";
      for (const auto& r : o.records) *os << r.dump() << "\n";
    } else {
      *os << "# " << header_record(c).dump() << "\n";
      for (const auto& n : o.csv_notes) *os << "# " << n.dump() << "\n";
      write_csv(o.csv_rows.empty() ? o.records : o.csv_rows, *os);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "hamrot: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "hamrot: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotation numbers, Conley-Zehnder indices and subharmonics of planar periodic Hamiltonian systems",
               "hamrot"};
  app.require_subcommand(1, 1);
  RunConfig c;
  std::string config_file;
  long j_value = 0;
  struct Sub {
    std::string name, help;
  };
  const std::vector<Sub> subs{
      {"classify", "label, index and multipliers of the linear system (or its linearization at 0)"},
      {"index", "full index report"},
      {"rotation", "certified rotation interval"},
      {"iterate", "index of the k-th iterate"},
      {"spectrum", "periodic Hill eigenvalues and Morse indices"},
      {"plan", "rotation gap and subharmonic candidates"},
      {"hunt", "twist radii and periodic orbits for (k, j)"},
      {"sweep", "classify or rotation over a parameter grid"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--system", c.system, "catalog spec \"name key=value ...\" or JSON coefficient file");
    sub->add_option("--config", config_file, "JSON run configuration (command line options override it)");
    sub->add_option("--tol", c.tol, "integration tolerance");
    sub->add_option("--K", c.K, "iterate count for the rotation interval");
    sub->add_option("--k", c.k, "period multiple");
    sub->add_option("--j", j_value, "winding number");
    sub->add_option("--horizon", c.horizon, "largest k scanned by plan");
    sub->add_option("--grid", c.grid, "omega grid for winding extrema");
    sub->add_option("--circle-grid", c.circle_grid, "points per circle in the twist search");
    sub->add_option("--n-max", c.n_max, "highest spectrum level");
    sub->add_option("--residual-tol", c.residual_tol, "fixed point residual target");
    sub->add_option("--sweep", c.sweep, "param=lo:hi:n (one or two)");
    sub->add_option("--sweep-command", c.sweep_command, "classify | rotation");
    sub->add_option("--workers", c.workers, "worker threads (0: hardware)");
    sub->add_option("--out", c.out, "output path");
    sub->add_option("--format", c.format, "json | csv");
    apps.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (!config_file.empty()) {
    try {
      std::ifstream in(config_file);
      if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + config_file + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed run config: ") + e.what());
      }
      RunConfig base = run_config_from_json(j);
      // Command line values win over the file.
      auto given = [&](const char* flag) { return chosen->get_option(flag)->count() > 0; };
      if (!given("--system")) c.system = base.system;
      if (!given("--tol")) c.tol = base.tol;
      if (!given("--K")) c.K = base.K;
      if (!given("--k")) c.k = base.k;
      if (!given("--j") && base.j) {
        j_value = *base.j;
        c.j = base.j;
      }
      if (!given("--horizon")) c.horizon = base.horizon;
      if (!given("--grid")) c.grid = base.grid;
      if (!given("--circle-grid")) c.circle_grid = base.circle_grid;
      if (!given("--n-max")) c.n_max = base.n_max;
      if (!given("--residual-tol")) c.residual_tol = base.residual_tol;
      if (!given("--sweep")) c.sweep = base.sweep;
      if (!given("--sweep-command")) c.sweep_command = base.sweep_command;
      if (!given("--workers")) c.workers = base.workers;
      if (!given("--out")) c.out = base.out;
      if (!given("--format")) c.format = base.format;
      if (!base.command.empty() && base.command != chosen->get_name())
        throw Error(ErrorKind::InvalidArgument, "config command '" + base.command + "' differs from the subcommand");
    } catch (const Error& e) {
      err << "hamrot: " << e.what() << "\n";
      return exit_code_for(e.kind());
    }
  }
  c.command = chosen->get_name();
  if (chosen->get_option("--j")->count() > 0) c.j = j_value;
  return run(c, out, err);
}

}  // namespace hamrot
