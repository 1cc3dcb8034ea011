#pragma once

// Declarative runs: a JSON config names a command and its parameters, and
// run() returns the artifact text plus a one-line summary. The schema is
// documented in docs/config.md.

#include <cstddef>
#include <string>
#include <vector>

#include "mcbias/serialize.hpp"

namespace mcbias {

struct RunOutput {
  std::string artifact;
  std::string summary;
  std::string format;  // "csv" or "json"
};

const std::vector<std::string>& command_names();

/// Fills defaults, canonicalizes ranges and rejects unknown or inapplicable
/// keys (ConfigError). The result is accepted by run() unchanged and
/// normalizing it again is a no-op.
Json normalize_config(const Json& config, std::size_t default_workers = 1);

/// Executes a config. Throws ConfigError for invalid input and
/// NumericalError for numerical failures.
RunOutput run(const Json& config, std::size_t default_workers = 1);

}  // namespace mcbias
