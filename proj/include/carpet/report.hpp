#pragma once
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace carpet {

// Machine-readable run record. Keys are stable; `carpetdim schema` documents
// the per-command result keys.
struct RunReport {
  std::string command;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  nlohmann::ordered_json timings_ms = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
};

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["inputs"] = r.inputs;
  j["seed"] = r.seed;
  j["results"] = r.results;
  j["warnings"] = r.warnings;
  j["timings_ms"] = r.timings_ms;
  return j;
}

inline RunReport report_from_json(const nlohmann::ordered_json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.results = j.at("results");
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.timings_ms = j.at("timings_ms");
  return r;
}

inline void write_report(const RunReport& r, const std::string& path) {
  if (path.size() < 5 || path.substr(path.size() - 5) != ".json")
    throw std::invalid_argument("write_report: machine format selected by extension; use .json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << to_json(r).dump(2) << "\n";
  if (!out) throw std::runtime_error("write_report: write failed for " + path);
}

inline RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_report: cannot open " + path);
  nlohmann::ordered_json j;
  in >> j;
  return report_from_json(j);
}

namespace detail {

inline void flatten(const nlohmann::ordered_json& j, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items())
      flatten(val, prefix.empty() ? key : prefix + "." + key, rows);
  } else if (j.is_array() && j.size() > 8) {
    rows.emplace_back(prefix, "[" + std::to_string(j.size()) + " values]");
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

}  // namespace detail

// Fixed-width key/value table for terminals.
inline std::string human_table(const RunReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  detail::flatten(r.results, "", rows);
  std::size_t width = 8;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream out;
  out << "command: " << r.command << "   seed: " << r.seed << "\n";
  for (const auto& [k, v] : rows)
    out << "  " << std::left << std::setw(static_cast<int>(width) + 2) << k << v
        << "\n";
  for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

}  // namespace carpet
