// SPDX-License-Identifier: MIT
//
// Output plumbing for the command-line harness: deterministic number
// formatting (shortest round-trip decimal), UTF-8 CSV tables with a header
// row, run manifests serialized as JSON with stable key ordering, and
// content hashing for reproducibility comparisons.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "kslab/common.hpp"

namespace kslab {

using json = nlohmann::ordered_json;

// Shortest decimal string that round-trips to exactly `x`. Using to_chars
// keeps output locale-independent and bitwise reproducible across runs.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// A plain tabular payload: one header row, then data rows. Serialization is
// deterministic given the cell contents.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::initializer_list<double> vals) {
    std::vector<std::string> row;
    row.reserve(vals.size());
    for (const double v : vals) row.push_back(format_double(v));
    rows.push_back(std::move(row));
  }

  std::string to_string() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(cells[i]);
      }
      os << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << to_string();
  }
};

// Record of one harness invocation: the subcommand, the fully resolved
// configuration (after merging any config file with command-line flags),
// the code version, the files written, and a pass/fail entry per checked
// invariant. Round-trips losslessly through JSON.
struct RunManifest {
  std::string command;
  json config = json::object();
  std::string version = version_string;
  std::vector<std::string> outputs;
  json checks = json::object();  // name -> {pass, measured, tolerance}
  double wall_time_seconds = 0.0;

  void add_check(const std::string& name, bool pass, double measured,
                 double tolerance) {
    json e = json::object();
    e["pass"] = pass;
    e["measured"] = measured;
    e["tolerance"] = tolerance;
    checks[name] = std::move(e);
  }

  bool all_checks_pass() const {
    for (const auto& [name, e] : checks.items()) {
      (void)name;
      if (!e.at("pass").get<bool>()) return false;
    }
    return true;
  }

  json to_json() const {
    json j = json::object();
    j["command"] = command;
    j["version"] = version;
    j["config"] = config;
    j["outputs"] = outputs;
    j["checks"] = checks;
    j["wall_time_seconds"] = wall_time_seconds;
    return j;
  }

  static RunManifest from_json(const json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config = j.at("config");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.checks = j.at("checks");
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    return m;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << to_json().dump(2) << '\n';
  }

  static RunManifest load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open manifest: " + path);
    return from_json(json::parse(f));
  }
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw domain_error("cannot open file for hashing: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return fnv1a(os.str());
}

// Hash of a manifest with the timing field erased: wall time legitimately
// differs between otherwise identical runs, so reproducibility comparisons
// hash everything else.
inline std::uint64_t manifest_content_hash(const std::string& path) {
  auto j = RunManifest::load(path).to_json();
  j["wall_time_seconds"] = 0.0;
  return fnv1a(j.dump(2));
}

}  // namespace kslab
