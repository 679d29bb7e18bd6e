#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "hetnetcov/csvio.hpp"
#include "hetnetcov/errors.hpp"

using namespace hetnetcov;

namespace {

std::filesystem::path temp_file(const std::string& stem) {
  static int counter = 0;
  return std::filesystem::temp_directory_path() /
         (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles are printed round-trip exact") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 42.0}) {
    const std::string s = format_g17(v);
    double back = 0.0;
    std::sscanf(s.c_str(), "%lf", &back);
    CHECK(back == v);
  }
  CHECK(format_g17(42.0) == "42");
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.config_path = "/some/where/fig2.cfg";
  m.config_hash = "0123456789abcdef";
  m.mode = "both";
  m.seed = 12345;
  m.realizations = 77;
  m.distance_samples = 4096;
  m.status = "ok";
  m.wall_seconds = 12.75;
  m.outputs = {"a.csv", "b.csv"};

  const auto path = temp_file("manifest");
  write_manifest(path.string(), m);
  const RunManifest r = read_manifest(path.string());
  CHECK(r.schema_version == m.schema_version);
  CHECK(r.config_path == m.config_path);
  CHECK(r.config_hash == m.config_hash);
  CHECK(r.mode == m.mode);
  CHECK(r.seed == m.seed);
  CHECK(r.realizations == m.realizations);
  CHECK(r.distance_samples == m.distance_samples);
  CHECK(r.status == m.status);
  CHECK(r.error_kind == m.error_kind);
  CHECK(r.wall_seconds == m.wall_seconds);
  CHECK(r.outputs == m.outputs);
  std::filesystem::remove(path);
}

TEST_CASE("identical tables produce byte-identical files") {
  NetworkCoverageTable t;
  t.gamma_linear = {0.1, 1.0, 10.0};
  t.pc = {0.9, 0.5, 0.25};
  t.pc_se = {0.001, 0.002, 0.003};
  TierCoverageTable tier;
  tier.tier_index = 0;
  tier.gamma_linear = t.gamma_linear;
  tier.term = {{0.6, 0.3}, {0.3, 0.2}, {0.15, 0.1}};
  tier.term_se = {{0.001, 0.001}, {0.001, 0.001}, {0.001, 0.001}};
  tier.pc = {0.9, 0.5, 0.25};
  tier.pc_se = t.pc_se;
  t.tiers.push_back(tier);

  const auto p1 = temp_file("net1.csv");
  const auto p2 = temp_file("net2.csv");
  write_analytic_network_csv(p1.string(), t);
  write_analytic_network_csv(p2.string(), t);
  const std::string b1 = read_all(p1), b2 = read_all(p2);
  CHECK(b1 == b2);
  CHECK(b1.find("\r") == std::string::npos);
  CHECK(b1.rfind("gamma_db,", 0) == 0);  // header row first
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("unwritable path raises io error") {
  NetworkCoverageTable t;
  t.gamma_linear = {1.0};
  t.pc = {0.5};
  t.pc_se = {0.01};
  CHECK_THROWS_AS(write_analytic_network_csv("/nonexistent_dir_zzz/x.csv", t), IoError);
  CHECK_THROWS_AS((void)read_manifest("/nonexistent_dir_zzz/m.txt"), IoError);
  CHECK_THROWS_AS((void)slurp_file("/nonexistent_dir_zzz/m.txt"), IoError);
}
