#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace fleetpoa {

struct RunConfig {
  std::string command;  ///< validate|check|solve|optimum|sweep|critical-share|monotonicity|oracle-compare|gen
  std::string network_path;
  std::optional<double> alpha;
  std::size_t grid = 101;
  double tol = 1e-8;
  std::size_t max_iters = 200000;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool exploratory = false;
  bool parallel = false;
  std::size_t links = 3;          ///< gen only
  double demand = 1.0;            ///< gen only
  std::size_t oracle_grid = 401;  ///< oracle-compare only
};

enum ExitCode : int {
  kExitOk = 0,
  kExitAssumption = 1,
  kExitNotConverged = 2,
  kExitIo = 3,
};

/// Parses argv into a RunConfig. Returns std::nullopt with `exit_code` set when parsing
/// ends the program (help requested or bad arguments); messages go to out/err.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                            std::ostream& err, int& exit_code);

/// Runs one command. Results go to config.out (or `out` when unset); diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fleetpoa
