#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "stancegraph/app/runtime.hpp"

namespace stancegraph::app {

/// Exit codes of the operator CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitNotFound = 4,
  kExitBusy = 5,
  kExitProvider = 6,
};

/// Runs one CLI invocation (`args` excludes the program name). Failures are
/// reported as a single JSON line on `err`. `base` lets embedders and tests
/// inject a provider or embedder.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const RuntimeOptions& base = {});

}  // namespace stancegraph::app
