#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hetnetcov {

// One CLI invocation, resolved.  `run` loads and validates the config,
// executes the requested estimators, writes CSV artifacts plus a manifest
// into out_dir, and maps failures to stable exit codes:
//   0 success, 2 invalid input, 3 convergence failure, 4 I/O failure.
// On failure the manifest is still written (status=failed) alongside any
// artifacts completed before the error.
struct RunSpec {
  std::string config_path;
  std::string mode = "both";  // analytic | montecarlo | both
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> realizations;
  std::optional<std::uint64_t> distance_samples;
  bool validate_only = false;
  bool quiet = false;
  // Reproduce a previous run: config path, seed and sample counts are taken
  // from its manifest; the config file must still hash to the recorded value.
  std::optional<std::string> from_manifest;
};

int run(const RunSpec& spec);

}  // namespace hetnetcov
