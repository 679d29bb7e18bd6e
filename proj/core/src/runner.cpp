#include "hetnetcov/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "hetnetcov/analytic.hpp"
#include "hetnetcov/config.hpp"
#include "hetnetcov/csvio.hpp"
#include "hetnetcov/errors.hpp"
#include "hetnetcov/geometry.hpp"
#include "hetnetcov/montecarlo.hpp"
#include "hetnetcov/rng.hpp"

namespace hetnetcov {

namespace {

RunMode parse_mode(const std::string& mode) {
  if (mode == "analytic") return RunMode::analytic;
  if (mode == "montecarlo") return RunMode::montecarlo;
  if (mode == "both") return RunMode::both;
  throw ValidationError("unknown mode '" + mode + "' (expected analytic, montecarlo or both)");
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  return 2;  // validation and misuse family
}

void note(bool quiet, const std::string& msg) {
  if (!quiet) std::printf("%s\n", msg.c_str());
}

}  // namespace

int run(const RunSpec& spec_in) {
  RunSpec spec = spec_in;
  const auto t0 = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.status = "failed";
  bool out_dir_ready = false;

  auto finalize = [&](const std::string& status, const std::string& error_kind) {
    manifest.status = status;
    manifest.error_kind = error_kind;
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out_dir_ready) return;  // nowhere safe to write
    try {
      write_manifest((std::filesystem::path(spec.out_dir) / "run_manifest.txt").string(), manifest);
    } catch (const Error&) {
      // Manifest write failure must not mask the primary outcome.
    }
  };

  try {
    if (spec.from_manifest) {
      const RunManifest prev = read_manifest(*spec.from_manifest);
      spec.config_path = prev.config_path;
      spec.mode = prev.mode;
      spec.seed = prev.seed;
      spec.realizations = prev.realizations;
      spec.distance_samples = prev.distance_samples;
      const std::string bytes = slurp_file(spec.config_path);
      if (fnv1a64_hex(bytes) != prev.config_hash)
        throw ValidationError("config " + spec.config_path +
                              " no longer matches the manifest hash " + prev.config_hash);
    }
    if (spec.config_path.empty()) throw ValidationError("no config file given");

    const RunMode mode = parse_mode(spec.mode);
    NetworkConfig cfg = load_config(spec.config_path, mode);
    if (spec.seed) cfg.mc.seed = *spec.seed;
    if (spec.realizations) cfg.mc.realizations = *spec.realizations;
    if (spec.distance_samples)
      cfg.quad.distance_samples = static_cast<int>(*spec.distance_samples);
    {
      std::vector<std::string> violations, warnings;
      validate_config(cfg, mode, violations, warnings);  // re-check overrides
      for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      if (!violations.empty()) {
        std::string all = "configuration invalid after overrides:";
        for (const std::string& v : violations) all += "\n  - " + v;
        throw ValidationError(all);
      }
    }
    if (spec.validate_only) {
      note(spec.quiet, "config ok: " + spec.config_path);
      return 0;
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + spec.out_dir + ": " + ec.message());
    out_dir_ready = true;

    manifest.config_path = spec.config_path;
    manifest.config_hash = fnv1a64_hex(slurp_file(spec.config_path));
    manifest.mode = spec.mode;
    manifest.seed = cfg.mc.seed;
    manifest.realizations = cfg.mc.realizations;
    manifest.distance_samples = static_cast<std::uint64_t>(cfg.quad.distance_samples);

    std::vector<double> gammas;
    gammas.reserve(cfg.sweep.gamma_db.size());
    for (double db : cfg.sweep.gamma_db) gammas.push_back(std::pow(10.0, db / 10.0));

    const auto out_path = [&](const char* name) {
      return (std::filesystem::path(spec.out_dir) / name).string();
    };
    const auto emit = [&](const char* name) { manifest.outputs.push_back(name); };

    const bool want_analytic = mode != RunMode::montecarlo;
    const bool want_mc = mode != RunMode::analytic;

    NetworkCoverageTable analytic_table;
    if (want_analytic) {
      note(spec.quiet, "analytic coverage: " + std::to_string(cfg.tiers.size()) + " tier(s), " +
                           std::to_string(gammas.size()) + " threshold(s)");
      AnalyticEngine engine(cfg);
      analytic_table = engine.network_coverage(gammas);
      write_analytic_tier_csv(out_path("analytic_per_tier.csv"), analytic_table);
      emit("analytic_per_tier.csv");
      write_analytic_network_csv(out_path("analytic_network.csv"), analytic_table);
      emit("analytic_network.csv");
    }

    CoverageResult mc_result;
    if (want_mc) {
      note(spec.quiet, "monte carlo coverage: " + std::to_string(cfg.mc.realizations) +
                           " realizations");
      std::vector<std::string> warnings;
      mc_result = estimate_coverage(cfg, gammas, &warnings);
      for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      write_mc_tier_csv(out_path("mc_per_tier.csv"), mc_result);
      emit("mc_per_tier.csv");
      write_mc_network_csv(out_path("mc_network.csv"), mc_result);
      emit("mc_network.csv");
      write_assoc_histogram_csv(out_path("assoc_histogram.csv"), mc_result);
      emit("assoc_histogram.csv");

      if (cfg.sweep.density_tier > 0) {
        note(spec.quiet, "density sweep: tier " + std::to_string(cfg.sweep.density_tier) + ", " +
                             std::to_string(cfg.sweep.density_values_per_m2.size()) + " points");
        std::vector<std::string> sweep_warnings;
        const DensitySweepResult sweep = mc_density_sweep(cfg, &sweep_warnings);
        for (const std::string& w : sweep_warnings)
          std::fprintf(stderr, "warning: %s\n", w.c_str());
        write_density_sweep_csv(out_path("density_sweep.csv"), sweep);
        emit("density_sweep.csv");
      }

      if (cfg.mc.debug_dump_realizations > 0) {
        for (std::size_t t = 0; t < cfg.tiers.size(); ++t) {
          const double window = mc_window_radius(cfg, t);
          const double density = derive_linear(cfg.tiers[t]).density;
          for (std::uint32_t i = 0; i < cfg.mc.debug_dump_realizations; ++i) {
            Rng rng(cfg.mc.seed, 0x44554d50ull + t, i);
            const PppRealization points = sample_ppp(density, window, rng);
            char name[64];
            std::snprintf(name, sizeof name, "realization_t%zu_r%u.csv", t + 1, i);
            dump_realization_csv(points, out_path(name));
            emit(name);
          }
        }
      }
    }

    if (want_analytic && want_mc) {
      write_comparison_csv(out_path("comparison.csv"), analytic_table, mc_result);
      emit("comparison.csv");
      double worst = 0.0;
      for (std::size_t g = 0; g < gammas.size(); ++g)
        worst = std::max(worst, std::abs(analytic_table.pc[g] - mc_result.network_pc[g]));
      note(spec.quiet, "max |analytic - mc| network coverage gap: " + format_g17(worst));
    }

    finalize("ok", "");
    note(spec.quiet, "wrote " + std::to_string(manifest.outputs.size() + 1) + " file(s) to " +
                         spec.out_dir);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", e.kind().c_str(), e.what());
    finalize("failed", e.kind());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    finalize("failed", "internal");
    return 3;
  }
}

}  // namespace hetnetcov
