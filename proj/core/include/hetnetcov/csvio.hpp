#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetnetcov/analytic.hpp"
#include "hetnetcov/montecarlo.hpp"

namespace hetnetcov {

// All writers emit a header row, one record per line, numbers in %.17g
// (round-trip exact), LF line endings, and throw IoError on any failure.
// Identical inputs produce byte-identical files.

void write_analytic_tier_csv(const std::string& path, const NetworkCoverageTable& table);
void write_analytic_network_csv(const std::string& path, const NetworkCoverageTable& table);
void write_mc_tier_csv(const std::string& path, const CoverageResult& result);
void write_mc_network_csv(const std::string& path, const CoverageResult& result);
void write_assoc_histogram_csv(const std::string& path, const CoverageResult& result);
void write_density_sweep_csv(const std::string& path, const DensitySweepResult& result);

// Side-by-side per-gamma comparison; both tables must share the gamma grid.
void write_comparison_csv(const std::string& path, const NetworkCoverageTable& analytic,
                          const CoverageResult& mc);

// Flat key=value record of one run, sufficient to reproduce it bit for bit.
struct RunManifest {
  int schema_version = 1;
  std::string config_path;
  std::string config_hash;  // fnv1a64 of the config file bytes
  std::string mode;         // analytic | montecarlo | both
  std::uint64_t seed = 0;
  std::uint64_t realizations = 0;
  std::uint64_t distance_samples = 0;
  std::string status;  // ok | failed
  std::string error_kind;  // empty unless failed
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;  // file names relative to the manifest
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

// Reads a whole file (for hashing); throws IoError if unreadable.
std::string slurp_file(const std::string& path);

std::string format_g17(double v);

}  // namespace hetnetcov
