#include "hetnetcov/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hetnetcov/errors.hpp"

namespace hetnetcov {

namespace {

double to_db(double linear) { return 10.0 * std::log10(linear); }

class CsvFile {
 public:
  explicit CsvFile(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
  }
  ~CsvFile() { close_quietly(); }

  void line(const std::string& s) {
    out_ << s << '\n';
    if (!out_) throw IoError("write failed on " + path_);
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError("flush failed on " + path_);
    out_.close();
  }

 private:
  void close_quietly() {
    if (out_.is_open()) out_.close();
  }
  std::string path_;
  std::ofstream out_;
};

std::string join(std::initializer_list<std::string> fields) {
  std::string row;
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) row += ',';
    row += f;
    first = false;
  }
  return row;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_analytic_tier_csv(const std::string& path, const NetworkCoverageTable& table) {
  CsvFile f(path);
  f.line("gamma_db,tier,m,term,term_se,pc_tier,pc_tier_se");
  for (const TierCoverageTable& t : table.tiers) {
    for (std::size_t g = 0; g < t.gamma_linear.size(); ++g) {
      for (std::size_t m = 0; m < t.term[g].size(); ++m) {
        f.line(join({format_g17(to_db(t.gamma_linear[g])), std::to_string(t.tier_index + 1),
                     std::to_string(m + 1), format_g17(t.term[g][m]), format_g17(t.term_se[g][m]),
                     format_g17(t.pc[g]), format_g17(t.pc_se[g])}));
      }
    }
  }
  f.finish();
}

void write_analytic_network_csv(const std::string& path, const NetworkCoverageTable& table) {
  CsvFile f(path);
  f.line("gamma_db,pc_network,pc_se");
  for (std::size_t g = 0; g < table.gamma_linear.size(); ++g)
    f.line(join({format_g17(to_db(table.gamma_linear[g])), format_g17(table.pc[g]),
                 format_g17(table.pc_se[g])}));
  f.finish();
}

void write_mc_tier_csv(const std::string& path, const CoverageResult& result) {
  CsvFile f(path);
  f.line("gamma_db,tier,pc,ci_lo,ci_hi,hits,realizations");
  for (const McTierCoverage& t : result.tiers) {
    for (std::size_t g = 0; g < result.gamma_linear.size(); ++g) {
      f.line(join({format_g17(to_db(result.gamma_linear[g])), std::to_string(t.tier_index + 1),
                   format_g17(t.pc[g]), format_g17(t.ci[g].lo), format_g17(t.ci[g].hi),
                   std::to_string(t.hits[g]), std::to_string(result.realizations)}));
    }
  }
  f.finish();
}

void write_mc_network_csv(const std::string& path, const CoverageResult& result) {
  CsvFile f(path);
  f.line("gamma_db,pc_network,ci_lo,ci_hi");
  for (std::size_t g = 0; g < result.gamma_linear.size(); ++g)
    f.line(join({format_g17(to_db(result.gamma_linear[g])), format_g17(result.network_pc[g]),
                 format_g17(result.network_ci[g].lo), format_g17(result.network_ci[g].hi)}));
  f.finish();
}

void write_assoc_histogram_csv(const std::string& path, const CoverageResult& result) {
  CsvFile f(path);
  f.line("tier,m,frequency");
  for (const McTierCoverage& t : result.tiers)
    for (std::size_t m = 0; m < t.assoc_frequency.size(); ++m)
      f.line(join({std::to_string(t.tier_index + 1), std::to_string(m + 1),
                   format_g17(t.assoc_frequency[m])}));
  f.finish();
}

void write_density_sweep_csv(const std::string& path, const DensitySweepResult& result) {
  CsvFile f(path);
  f.line("density_per_m2,pc_network,ci_lo,ci_hi");
  for (const DensitySweepPoint& p : result.points)
    f.line(join({format_g17(p.density_per_m2), format_g17(p.pc), format_g17(p.ci.lo),
                 format_g17(p.ci.hi)}));
  f.finish();
}

void write_comparison_csv(const std::string& path, const NetworkCoverageTable& analytic,
                          const CoverageResult& mc) {
  if (analytic.gamma_linear.size() != mc.gamma_linear.size())
    throw ValidationError("comparison: analytic and MC gamma grids differ in size");
  for (std::size_t g = 0; g < mc.gamma_linear.size(); ++g)
    if (std::abs(analytic.gamma_linear[g] - mc.gamma_linear[g]) >
        1e-12 * std::max(1.0, std::abs(mc.gamma_linear[g])))
      throw ValidationError("comparison: analytic and MC gamma grids differ");
  CsvFile f(path);
  f.line("gamma_db,pc_analytic,pc_mc,delta");
  for (std::size_t g = 0; g < mc.gamma_linear.size(); ++g)
    f.line(join({format_g17(to_db(mc.gamma_linear[g])), format_g17(analytic.pc[g]),
                 format_g17(mc.network_pc[g]), format_g17(analytic.pc[g] - mc.network_pc[g])}));
  f.finish();
}

void write_manifest(const std::string& path, const RunManifest& m) {
  CsvFile f(path);
  f.line("schema_version=" + std::to_string(m.schema_version));
  f.line("config_path=" + m.config_path);
  f.line("config_hash=" + m.config_hash);
  f.line("mode=" + m.mode);
  f.line("seed=" + std::to_string(m.seed));
  f.line("realizations=" + std::to_string(m.realizations));
  f.line("distance_samples=" + std::to_string(m.distance_samples));
  f.line("status=" + m.status);
  f.line("error_kind=" + m.error_kind);
  f.line("wall_seconds=" + format_g17(m.wall_seconds));
  std::string outs;
  for (const std::string& o : m.outputs) {
    if (!outs.empty()) outs += ',';
    outs += o;
  }
  f.line("outputs=" + outs);
  f.finish();
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path);
  RunManifest m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("manifest " + path + " line " + std::to_string(line_no) + ": missing '='");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "schema_version") m.schema_version = std::stoi(value);
      else if (key == "config_path") m.config_path = value;
      else if (key == "config_hash") m.config_hash = value;
      else if (key == "mode") m.mode = value;
      else if (key == "seed") m.seed = std::stoull(value);
      else if (key == "realizations") m.realizations = std::stoull(value);
      else if (key == "distance_samples") m.distance_samples = std::stoull(value);
      else if (key == "status") m.status = value;
      else if (key == "error_kind") m.error_kind = value;
      else if (key == "wall_seconds") m.wall_seconds = std::stod(value);
      else if (key == "outputs") {
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) m.outputs.push_back(item);
      }
      // Unknown keys are ignored so newer manifests stay readable.
    } catch (const std::exception&) {
      throw IoError("manifest " + path + " line " + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  if (m.schema_version != 1)
    throw IoError("manifest " + path + ": unsupported schema_version " +
                  std::to_string(m.schema_version));
  return m;
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed on " + path);
  return ss.str();
}

}  // namespace hetnetcov
