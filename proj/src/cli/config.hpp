#pragma once

// Run manifests: one JSON document per experiment. Relative file paths inside
// a manifest resolve against the manifest's directory.
//
//   {
//     "environment": {"p_bar": 0.3, "p_low": 0.05, "c": 0.3, "beta": 0.2},
//     "monitoring":  {"model": "rational", "w0": 0.1},
//     "topology":    {"generator": "complete", "n": 8, "lambda0": 1},
//     "subset":      [1, 2, 3],
//     "seed":        1,
//     "<command>":   {...}
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mutualsec/design.hpp"
#include "mutualsec/network.hpp"

namespace mutualsec::cli {

using nlohmann::json;

struct RunConfig {
  json doc;
  std::filesystem::path base_dir;
  Environment env;
  MonitoringModel mon;
  std::optional<TrafficMatrix> tm;  // absent when the manifest has no topology section
  std::uint64_t seed = 1;

  const TrafficMatrix& traffic() const;
  // The "subset" field, or the full collection.
  Subset subset() const;
  // Section of the document, or an empty object.
  json section(const std::string& name) const;
};

// Applies "a.b.c=value" to the document; value is parsed as JSON when
// possible and kept as a string otherwise.
void apply_override(json& doc, const std::string& assignment);

// Throws ConfigError naming the offending field.
RunConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides);
RunConfig build_config(json doc, std::filesystem::path base_dir);

Environment parse_environment(const json& section);
MonitoringModel parse_monitoring(const json& section, const std::filesystem::path& base_dir);
TrafficMatrix parse_topology(const json& section, const std::filesystem::path& base_dir);

// Typed field access with the dotted field name in error messages.
double get_double(const json& obj, const std::string& key, const std::string& field_prefix);
double get_double(const json& obj, const std::string& key, const std::string& field_prefix, double fallback);
std::size_t get_count(const json& obj, const std::string& key, const std::string& field_prefix);
std::size_t get_count(const json& obj, const std::string& key, const std::string& field_prefix,
                      std::size_t fallback);
std::vector<double> get_doubles(const json& obj, const std::string& key, const std::string& field_prefix);

}  // namespace mutualsec::cli
