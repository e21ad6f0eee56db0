#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gqads::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIoError = 1,
  kExitReject = 2,
  kExitUsage = 3,
  kExitInfeasible = 4,
};

/// Runs one invocation; args excludes the program name. Reads GQADS_SEED when
/// --seed is absent.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gqads::cli
