#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gpw/manifest.hpp"

using namespace gpw;

TEST_CASE("g17 formatting round trips doubles", "[manifest]") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 * kSqrt2 / 3.0, 1e-300, -3.5e17}) {
    const std::string s = format_g17(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("manifest json round trip", "[manifest]") {
  RunManifest m;
  m.subcommand = "disp1d";
  m.config = {{"c_start", 0.0}, {"c_stop", 1.4}, {"c_step", 0.1}};
  m.seed = 42;
  m.grid_spec = "1d n=32 [4096]";
  m.timestamp = RunManifest::now_iso8601();

  const auto dir = std::filesystem::temp_directory_path();
  const std::string art = (dir / "gpw_manifest_art.csv").string();
  {
    std::ofstream out(art);
    out << "c,energy\n0.5,0.76\n";
  }
  m.add_artifact(art);

  const std::string path = (dir / "gpw_manifest_test.json").string();
  m.write(path);
  const RunManifest r = RunManifest::load(path);
  CHECK(r.subcommand == m.subcommand);
  CHECK(r.config == m.config);
  CHECK(r.seed == m.seed);
  CHECK(r.grid_spec == m.grid_spec);
  CHECK(r.artifact_hashes == m.artifact_hashes);

  // identical bytes hash identically, a change flips the hash
  const auto h1 = hash_file(art);
  {
    std::ofstream out(art);
    out << "c,energy\n0.5,0.77\n";
  }
  CHECK(hash_file(art) != h1);

  std::remove(art.c_str());
  std::remove(path.c_str());
}
