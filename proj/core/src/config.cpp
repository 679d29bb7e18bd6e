#include "hetnetcov/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "hetnetcov/errors.hpp"

namespace hetnetcov {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  // '#' and ';' start comments anywhere outside of values we care about; the
  // config format has no quoted strings, so this is safe.
  std::size_t pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

struct KeyValue {
  std::string section;
  int block_id;  // increments on every section header, so repeated [tier] blocks stay distinct
  std::string key;
  std::string value;
  int line_no;
};

struct ParsedFile {
  std::vector<KeyValue> entries;
  std::vector<std::string> errors;
};

ParsedFile parse_lines(std::istream& in) {
  ParsedFile out;
  std::string line;
  std::string section;
  int block_id = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        out.errors.push_back("line " + std::to_string(line_no) + ": malformed section header '" + body + "'");
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      ++block_id;
      continue;
    }
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back("line " + std::to_string(line_no) + ": expected key = value, got '" + body + "'");
      continue;
    }
    KeyValue kv;
    kv.section = section;
    kv.block_id = block_id;
    kv.key = trim(body.substr(0, eq));
    kv.value = trim(body.substr(eq + 1));
    kv.line_no = line_no;
    if (kv.key.empty()) {
      out.errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    out.entries.push_back(std::move(kv));
  }
  return out;
}

class ValueReader {
 public:
  ValueReader(const KeyValue& kv, std::vector<std::string>& errors) : kv_(kv), errors_(errors) {}

  std::optional<double> as_double() const {
    try {
      std::size_t used = 0;
      double v = std::stod(kv_.value, &used);
      if (used != kv_.value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected a number");
      return std::nullopt;
    }
  }

  std::optional<long long> as_int() const {
    try {
      std::size_t used = 0;
      long long v = std::stoll(kv_.value, &used);
      if (used != kv_.value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected an integer");
      return std::nullopt;
    }
  }

  std::optional<bool> as_bool() const {
    std::string v = kv_.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail("expected a boolean (true/false)");
    return std::nullopt;
  }

  // Accepts either a comma/space separated list or a start:step:stop range
  // (stop inclusive up to a half-step slack).
  std::optional<std::vector<double>> as_double_list() const {
    const std::string& raw = kv_.value;
    std::vector<double> out;
    if (raw.find(':') != std::string::npos) {
      double start = 0, step = 0, stop = 0;
      char extra = 0;
      if (std::sscanf(raw.c_str(), "%lf:%lf:%lf %c", &start, &step, &stop, &extra) != 3) {
        fail("expected start:step:stop");
        return std::nullopt;
      }
      if (step <= 0 || stop < start) {
        fail("range requires step > 0 and stop >= start");
        return std::nullopt;
      }
      for (double v = start; v <= stop + 0.5 * step; v += step) out.push_back(v);
      return out;
    }
    std::string item;
    std::istringstream ss(raw);
    std::string norm = raw;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::istringstream ns(norm);
    while (ns >> item) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail("expected a list of numbers, bad item '" + item + "'");
        return std::nullopt;
      }
    }
    if (out.empty()) {
      fail("expected a nonempty list");
      return std::nullopt;
    }
    return out;
  }

  const std::string& raw() const { return kv_.value; }

 private:
  void fail(const std::string& what) const {
    errors_.push_back("line " + std::to_string(kv_.line_no) + ": key '" + kv_.key + "': " + what);
  }

  const KeyValue& kv_;
  std::vector<std::string>& errors_;
};

constexpr double kSquareMetersPerSquareKm = 1e6;

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

NetworkConfig load_config(const std::string& path, RunMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");

  ParsedFile parsed = parse_lines(in);
  std::vector<std::string> errors = std::move(parsed.errors);

  NetworkConfig cfg;
  cfg.tiers.clear();
  bool saw_schema_version = false;
  bool density_sweep_in_km2 = false;

  TierParams* tier = nullptr;
  int tier_block = -1;
  bool tier_density_set = false;

  auto unknown = [&errors](const KeyValue& kv) {
    errors.push_back("line " + std::to_string(kv.line_no) + ": unknown key '" + kv.key + "' in section [" +
                     kv.section + "]");
  };

  for (const KeyValue& kv : parsed.entries) {
    ValueReader v(kv, errors);
    if (kv.section.empty()) {
      if (kv.key == "schema_version") {
        if (auto n = v.as_int()) {
          saw_schema_version = true;
          if (*n != 1) errors.push_back("unsupported schema_version " + std::to_string(*n) + " (expected 1)");
        }
      } else {
        unknown(kv);
      }
      continue;
    }
    if (kv.section == "network") {
      if (kv.key == "n_candidates") {
        if (auto n = v.as_int()) cfg.n_candidates = static_cast<int>(*n);
      } else if (kv.key == "blockage_kappa_per_m") {
        if (auto d = v.as_double()) cfg.blockage_kappa_per_m = *d;
      } else {
        unknown(kv);
      }
      continue;
    }
    if (kv.section == "tier") {
      // Each [tier] header opens a fresh tier; block_id keeps repeated
      // headers distinct even when the blocks are adjacent.
      if (tier == nullptr || kv.block_id != tier_block) {
        cfg.tiers.emplace_back();
        tier = &cfg.tiers.back();
        tier_block = kv.block_id;
        tier_density_set = false;
      }
      if (kv.key == "density_per_km2") {
        if (auto d = v.as_double()) {
          if (tier_density_set) errors.push_back("line " + std::to_string(kv.line_no) + ": tier density set twice");
          tier->density_per_m2 = *d / kSquareMetersPerSquareKm;
          tier_density_set = true;
        }
      } else if (kv.key == "density_per_m2") {
        if (auto d = v.as_double()) {
          if (tier_density_set) errors.push_back("line " + std::to_string(kv.line_no) + ": tier density set twice");
          tier->density_per_m2 = *d;
          tier_density_set = true;
        }
      } else if (kv.key == "tx_power_dbm") {
        if (auto d = v.as_double()) tier->tx_power_dbm = *d;
      } else if (kv.key == "intercept_nlos_db") {
        if (auto d = v.as_double()) tier->intercept_nlos_db = *d;
      } else if (kv.key == "intercept_los_db") {
        if (auto d = v.as_double()) tier->intercept_los_db = *d;
      } else if (kv.key == "exponent_nlos") {
        if (auto d = v.as_double()) tier->exponent_nlos = *d;
      } else if (kv.key == "exponent_los") {
        if (auto d = v.as_double()) tier->exponent_los = *d;
      } else if (kv.key == "shadow_sigma_nlos_db") {
        if (auto d = v.as_double()) tier->shadow_sigma_nlos_db = *d;
      } else if (kv.key == "shadow_sigma_los_db") {
        if (auto d = v.as_double()) tier->shadow_sigma_los_db = *d;
      } else if (kv.key == "blockage_kappa_per_m") {
        if (auto d = v.as_double()) tier->blockage_kappa_per_m = *d;
      } else {
        unknown(kv);
      }
      continue;
    }
    tier = nullptr;  // left any [tier] block
    if (kv.section == "mc") {
      if (kv.key == "realizations") {
        if (auto n = v.as_int()) cfg.mc.realizations = static_cast<std::uint64_t>(std::max(0ll, *n));
      } else if (kv.key == "seed") {
        if (auto n = v.as_int()) cfg.mc.seed = static_cast<std::uint64_t>(*n);
      } else if (kv.key == "window_radius_m") {
        if (auto d = v.as_double()) cfg.mc.window_radius_m = *d;
      } else if (kv.key == "farfield_all_nlos") {
        if (auto b = v.as_bool()) cfg.mc.farfield_all_nlos = *b;
      } else if (kv.key == "debug_dump_realizations") {
        if (auto n = v.as_int()) cfg.mc.debug_dump_realizations = static_cast<std::uint32_t>(std::max(0ll, *n));
      } else if (kv.key == "threads") {
        if (auto n = v.as_int()) cfg.mc.threads = static_cast<unsigned>(std::max(0ll, *n));
      } else {
        unknown(kv);
      }
      continue;
    }
    if (kv.section == "quad") {
      if (kv.key == "gauss_hermite_nodes") {
        if (auto n = v.as_int()) cfg.quad.gauss_hermite_nodes = static_cast<int>(*n);
      } else if (kv.key == "talbot_nodes" || kv.key == "inversion_nodes") {
        if (auto n = v.as_int()) cfg.quad.talbot_nodes = static_cast<int>(*n);
      } else if (kv.key == "euler_terms") {
        if (auto n = v.as_int()) cfg.quad.euler_terms = static_cast<int>(*n);
      } else if (kv.key == "inversion_method") {
        cfg.quad.inversion_method = v.raw();
      } else if (kv.key == "far_tail_rel_tol") {
        if (auto d = v.as_double()) cfg.quad.far_tail_rel_tol = *d;
      } else if (kv.key == "distance_samples") {
        if (auto n = v.as_int()) cfg.quad.distance_samples = static_cast<int>(*n);
      } else if (kv.key == "distance_tensor_quadrature") {
        if (auto b = v.as_bool()) cfg.quad.distance_tensor_quadrature = *b;
      } else if (kv.key == "t_panel_points") {
        if (auto n = v.as_int()) cfg.quad.t_panel_points = static_cast<int>(*n);
      } else if (kv.key == "t_panel_sigma_fraction") {
        if (auto d = v.as_double()) cfg.quad.t_panel_sigma_fraction = *d;
      } else if (kv.key == "t_range_sigmas") {
        if (auto d = v.as_double()) cfg.quad.t_range_sigmas = *d;
      } else if (kv.key == "prune_rel_tol") {
        if (auto d = v.as_double()) cfg.quad.prune_rel_tol = *d;
      } else if (kv.key == "self_check") {
        if (auto b = v.as_bool()) cfg.quad.self_check = *b;
      } else if (kv.key == "threads") {
        if (auto n = v.as_int()) cfg.quad.threads = static_cast<unsigned>(std::max(0ll, *n));
      } else {
        unknown(kv);
      }
      continue;
    }
    if (kv.section == "sweep") {
      if (kv.key == "gamma_db") {
        if (auto list = v.as_double_list()) cfg.sweep.gamma_db = std::move(*list);
      } else if (kv.key == "density_tier") {
        if (auto n = v.as_int()) cfg.sweep.density_tier = static_cast<int>(*n);
      } else if (kv.key == "density_values_per_km2") {
        if (auto list = v.as_double_list()) {
          cfg.sweep.density_values_per_m2 = std::move(*list);
          density_sweep_in_km2 = true;
        }
      } else if (kv.key == "density_values_per_m2") {
        if (auto list = v.as_double_list()) cfg.sweep.density_values_per_m2 = std::move(*list);
      } else if (kv.key == "density_gamma_db") {
        if (auto d = v.as_double()) cfg.sweep.density_gamma_db = *d;
      } else {
        unknown(kv);
      }
      continue;
    }
    errors.push_back("line " + std::to_string(kv.line_no) + ": unknown section [" + kv.section + "]");
  }

  if (density_sweep_in_km2) {
    for (double& d : cfg.sweep.density_values_per_m2) d /= kSquareMetersPerSquareKm;
  }
  if (!saw_schema_version) errors.push_back("missing required key 'schema_version'");

  std::vector<std::string> warnings;
  validate_config(cfg, mode, errors, warnings);
  if (!errors.empty()) {
    std::string msg = "config '" + path + "' invalid:";
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

bool validate_config(const NetworkConfig& cfg, RunMode mode, std::vector<std::string>& violations,
                     std::vector<std::string>& warnings) {
  const std::size_t before = violations.size();

  if (cfg.tiers.empty()) violations.push_back("at least one [tier] section is required");
  if (cfg.n_candidates < 1) violations.push_back("n_candidates must be >= 1");
  if (!(cfg.blockage_kappa_per_m >= 0.0) || !std::isfinite(cfg.blockage_kappa_per_m))
    violations.push_back("blockage_kappa_per_m must be finite and >= 0");

  const bool analytic = (mode == RunMode::analytic || mode == RunMode::both);

  for (std::size_t k = 0; k < cfg.tiers.size(); ++k) {
    const std::string label = "tier " + std::to_string(k + 1);
    auto tier_violations = check_tier(cfg.tiers[k], label);
    violations.insert(violations.end(), tier_violations.begin(), tier_violations.end());
    auto tw = tier_warnings(cfg.tiers[k], label);
    warnings.insert(warnings.end(), tw.begin(), tw.end());
    if (cfg.tiers[k].blockage_kappa_per_m) {
      double kap = *cfg.tiers[k].blockage_kappa_per_m;
      if (!(kap >= 0.0) || !std::isfinite(kap))
        violations.push_back(label + ": blockage_kappa_per_m must be finite and >= 0");
    }
    if (analytic && !(cfg.tiers[k].exponent_nlos > 2.0))
      violations.push_back(label + ": exponent_nlos must exceed 2 (interference tail integral diverges otherwise)");
    if (mode == RunMode::montecarlo && cfg.mc.window_radius_m <= 0.0 && !(cfg.tiers[k].exponent_nlos > 2.0))
      violations.push_back(label +
                           ": exponent_nlos <= 2 requires an explicit mc.window_radius_m (automatic sizing diverges)");
  }

  if (cfg.mc.realizations < 1) violations.push_back("mc.realizations must be >= 1");
  if (cfg.mc.window_radius_m < 0.0 || !std::isfinite(cfg.mc.window_radius_m))
    violations.push_back("mc.window_radius_m must be finite and >= 0");

  const QuadControls& q = cfg.quad;
  if (q.gauss_hermite_nodes < 2 || q.gauss_hermite_nodes > 128)
    violations.push_back("quad.gauss_hermite_nodes must be in [2, 128]");
  if (q.talbot_nodes < 8 || q.talbot_nodes > 256) violations.push_back("quad.talbot_nodes must be in [8, 256]");
  if (q.euler_terms < 4 || q.euler_terms > 40) violations.push_back("quad.euler_terms must be in [4, 40]");
  if (q.inversion_method != "auto" && q.inversion_method != "talbot" && q.inversion_method != "euler")
    violations.push_back("quad.inversion_method must be one of auto, talbot, euler");
  if (!(q.far_tail_rel_tol > 0.0) || q.far_tail_rel_tol > 1e-4)
    violations.push_back("quad.far_tail_rel_tol must be in (0, 1e-4]");
  if (q.distance_samples < 16) violations.push_back("quad.distance_samples must be >= 16");
  if (q.t_panel_points < 2 || q.t_panel_points > 32) violations.push_back("quad.t_panel_points must be in [2, 32]");
  if (!(q.t_panel_sigma_fraction > 0.0) || q.t_panel_sigma_fraction > 2.0)
    violations.push_back("quad.t_panel_sigma_fraction must be in (0, 2]");
  if (!(q.t_range_sigmas >= 4.0) || q.t_range_sigmas > 16.0)
    violations.push_back("quad.t_range_sigmas must be in [4, 16]");
  if (!(q.prune_rel_tol >= 0.0) || q.prune_rel_tol > 1e-2)
    violations.push_back("quad.prune_rel_tol must be in [0, 1e-2]");
  if (analytic && q.distance_tensor_quadrature && cfg.n_candidates > 2)
    violations.push_back("quad.distance_tensor_quadrature supports n_candidates <= 2 only");

  if (cfg.sweep.gamma_db.empty()) {
    violations.push_back("sweep.gamma_db must list at least one threshold");
  } else {
    for (double g : cfg.sweep.gamma_db)
      if (!std::isfinite(g)) violations.push_back("sweep.gamma_db entries must be finite");
    for (std::size_t i = 1; i < cfg.sweep.gamma_db.size(); ++i)
      if (!(cfg.sweep.gamma_db[i] > cfg.sweep.gamma_db[i - 1])) {
        violations.push_back("sweep.gamma_db must be strictly increasing");
        break;
      }
  }
  if (cfg.sweep.density_tier != 0) {
    if (cfg.sweep.density_tier < 1 || static_cast<std::size_t>(cfg.sweep.density_tier) > cfg.tiers.size())
      violations.push_back("sweep.density_tier must name an existing tier (1-based)");
    if (cfg.sweep.density_values_per_m2.empty())
      violations.push_back("sweep.density_values_per_m2 (or _per_km2) required when density_tier is set");
    for (double d : cfg.sweep.density_values_per_m2)
      if (!(d > 0.0) || !std::isfinite(d)) violations.push_back("density sweep values must be positive and finite");
    if (!std::isfinite(cfg.sweep.density_gamma_db)) violations.push_back("sweep.density_gamma_db must be finite");
  } else if (!cfg.sweep.density_values_per_m2.empty()) {
    violations.push_back("sweep.density_values_per_m2 given without sweep.density_tier");
  }

  return violations.size() == before;
}

}  // namespace hetnetcov
