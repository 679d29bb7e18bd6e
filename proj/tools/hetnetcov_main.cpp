#include <CLI11.hpp>

#include "hetnetcov/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coverage probability for multi-tier cellular networks with blockage and shadowing"};

  hetnetcov::RunSpec spec;
  std::uint64_t seed = 0, realizations = 0, distance_samples = 0;
  std::string from_manifest;

  app.add_option("-c,--config", spec.config_path, "Config file (key=value format)");
  app.add_option("-m,--mode", spec.mode, "analytic, montecarlo or both")
      ->check(CLI::IsMember({"analytic", "montecarlo", "both"}))
      ->capture_default_str();
  app.add_option("-o,--out", spec.out_dir, "Output directory for CSV artifacts")
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* real_opt =
      app.add_option("--realizations", realizations, "Override the Monte Carlo realization count");
  auto* dist_opt = app.add_option("--distance-samples", distance_samples,
                                  "Override the analytic distance sample count");
  app.add_flag("--validate", spec.validate_only, "Check the config and exit");
  app.add_flag("-q,--quiet", spec.quiet, "Suppress progress output");
  auto* manifest_opt = app.add_option("--from-manifest", from_manifest,
                                      "Reproduce a previous run from its manifest");

  CLI11_PARSE(app, argc, argv);

  if (seed_opt->count()) spec.seed = seed;
  if (real_opt->count()) spec.realizations = realizations;
  if (dist_opt->count()) spec.distance_samples = distance_samples;
  if (manifest_opt->count()) spec.from_manifest = from_manifest;

  return hetnetcov::run(spec);
}
