#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamrot/serialize.hpp"

namespace hamrot {

// Exit codes of the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitGapUncertified = 3,
  kExitTwistNotFound = 4,
  kExitNoOrbitFound = 5,
  kExitNearDegenerate = 6,
};

int exit_code_for(ErrorKind kind);

struct RunConfig {
  std::string command;  // classify|index|rotation|iterate|spectrum|plan|hunt|sweep
  std::string system;   // catalog spec "name key=value ..." or a JSON coefficient file
  double tol = 1e-12;   // integration tolerance
  int K = 200;
  int k = 1;
  std::optional<long> j;
  int horizon = 10;
  int grid = 256;          // omega grid for the winding extrema
  int circle_grid = 64;    // points per circle in the twist search
  int n_max = 2;           // spectrum level
  double residual_tol = 1e-8;
  std::vector<std::string> sweep;      // "param=lo:hi:n", at most two
  std::string sweep_command = "classify";
  unsigned workers = 0;
  std::string out;                     // empty: standard output
  std::string format = "json";         // json (json-lines) | csv
};

// Rejects unknown keys.
RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& c);

// Executes a validated configuration and writes the report.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line entry point (argv[0] is the program name).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hamrot
