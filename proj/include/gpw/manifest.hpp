#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpw/common.hpp"

namespace gpw {

inline constexpr const char* kVersion = "gpwaves 0.1.0";

/// All numeric CSV output uses the full 17-significant-digit decimal form.
inline std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
    ncols_ = columns.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != ncols_) throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_g17(values[i]);
    }
    out_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& values) {
    if (values.size() != ncols_) throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t ncols_ = 0;
};

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash_file: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

/// Config echo plus provenance for one CLI invocation; rerunning from the
/// manifest reproduces all artifacts bit-identically within one build.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string grid_spec;
  std::string version = kVersion;
  std::string timestamp;
  std::map<std::string, std::string> artifact_hashes;

  static std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
  }

  void add_artifact(const std::string& path) {
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash_file(path)));
    artifact_hashes[path] = hex;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["seed"] = seed;
    j["grid"] = grid_spec;
    j["version"] = version;
    j["timestamp"] = timestamp;
    j["artifacts"] = artifact_hashes;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config");
    m.seed = j.value("seed", std::uint64_t{0});
    m.grid_spec = j.value("grid", std::string{});
    m.version = j.value("version", std::string{});
    m.timestamp = j.value("timestamp", std::string{});
    if (j.contains("artifacts"))
      m.artifact_hashes = j.at("artifacts").get<std::map<std::string, std::string>>();
    return m;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("RunManifest: cannot open " + path);
    out << to_json().dump(2) << '\n';
  }

  static RunManifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("RunManifest: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

}  // namespace gpw
