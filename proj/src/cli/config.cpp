#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mutualsec/error.hpp"
#include "mutualsec/io.hpp"

namespace mutualsec::cli {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

std::string num_str(double x) { return io::format_double(x); }

fs::path resolve(const fs::path& base, const std::string& p, const std::string& field) {
  fs::path full = fs::path(p).is_absolute() ? fs::path(p) : base / p;
  if (!fs::exists(full)) throw ConfigError(field, "file not found: " + full.string());
  return full;
}

template <class F>
auto rethrow_as(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

double get_double(const json& obj, const std::string& key, const std::string& prefix) {
  const std::string field = join(prefix, key);
  if (!obj.contains(key)) throw ConfigError(field, "missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

double get_double(const json& obj, const std::string& key, const std::string& prefix, double fallback) {
  return obj.contains(key) ? get_double(obj, key, prefix) : fallback;
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& prefix) {
  const std::string field = join(prefix, key);
  if (!obj.contains(key)) throw ConfigError(field, "missing");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field, "must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& prefix, std::size_t fallback) {
  return obj.contains(key) ? get_count(obj, key, prefix) : fallback;
}

std::vector<double> get_doubles(const json& obj, const std::string& key, const std::string& prefix) {
  const std::string field = join(prefix, key);
  if (!obj.contains(key)) throw ConfigError(field, "missing");
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(field, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const TrafficMatrix& RunConfig::traffic() const {
  if (!tm) throw ConfigError("topology", "missing");
  return *tm;
}

Subset RunConfig::subset() const {
  const std::size_t n = traffic().size();
  if (!doc.contains("subset") || doc.at("subset").is_null()) return Subset::all(n);
  const json& s = doc.at("subset");
  if (!s.is_array()) throw ConfigError("subset", "must be an array of 1-based AS labels");
  std::vector<AsIndex> members;
  for (const auto& x : s) {
    if (!x.is_number_integer() || x.get<long long>() < 1 || x.get<std::size_t>() > n)
      throw ConfigError("subset", "labels must be integers in 1.." + std::to_string(n));
    members.push_back(x.get<std::size_t>() - 1);
  }
  return rethrow_as("subset", [&] { return Subset(n, members); });
}

json RunConfig::section(const std::string& name) const {
  if (!doc.contains(name)) return json::object();
  const json& s = doc.at(name);
  if (!s.is_object()) throw ConfigError(name, "must be an object");
  return s;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].empty()) throw ConfigError("--set", "empty path component in '" + key + "'");
    if (!node->is_object()) throw ConfigError(key, "cannot set a field inside a non-object");
    if (k + 1 == parts.size()) {
      (*node)[parts[k]] = value;
    } else {
      node = &(*node)[parts[k]];
      if (node->is_null()) *node = json::object();
    }
  }
}

Environment parse_environment(const json& s) {
  const std::string p = "environment";
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string& k = it.key();
    if (k != "p_bar" && k != "p_high" && k != "p_low" && k != "c" && k != "beta")
      throw ConfigError(join(p, k), "unknown field");
  }
  Environment env;
  env.p_high = s.contains("p_bar") ? get_double(s, "p_bar", p) : get_double(s, "p_high", p, env.p_high);
  env.p_low = get_double(s, "p_low", p, env.p_low);
  env.c = get_double(s, "c", p, env.c);
  env.beta = get_double(s, "beta", p, env.beta);
  if (env.p_high < 0.0 || env.p_high > 1.0) throw ConfigError("environment.p_bar", "must lie in [0, 1]");
  if (env.p_low < 0.0 || env.p_low > 1.0) throw ConfigError("environment.p_low", "must lie in [0, 1]");
  if (env.p_low > env.p_high)
    throw ConfigError("environment.p_low",
                      "p_low (" + num_str(env.p_low) + ") exceeds p_bar (" + num_str(env.p_high) + ")");
  if (!(env.c > 0.0)) throw ConfigError("environment.c", "must be positive");
  if (!(env.beta > 0.0)) throw ConfigError("environment.beta", "must be positive");
  return env;
}

MonitoringModel parse_monitoring(const json& s, const fs::path& base) {
  const std::string p = "monitoring";
  const std::string model = s.value("model", std::string("rational"));
  if (model == "rational") {
    const double w0 = get_double(s, "w0", p, 0.1);
    if (!(w0 > 0.0)) throw ConfigError("monitoring.w0", "must be positive");
    return MonitoringModel::rational(w0);
  }
  if (model == "perfect") return MonitoringModel::perfect();
  if (model == "tabulated") {
    std::vector<std::pair<double, double>> pts;
    if (s.contains("file")) {
      const fs::path f = resolve(base, s.at("file").get<std::string>(), "monitoring.file");
      pts = rethrow_as("monitoring.file", [&] { return io::read_curve_csv(f); });
    } else if (s.contains("points")) {
      for (const auto& pt : s.at("points")) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
          throw ConfigError("monitoring.points", "each point must be [T, eps]");
        pts.emplace_back(pt[0].get<double>(), pt[1].get<double>());
      }
    } else {
      throw ConfigError("monitoring", "tabulated model needs 'file' or 'points'");
    }
    MonitoringModel m = rethrow_as("monitoring.points", [&] { return MonitoringModel::tabulated(pts); });
    const auto v = m.check();
    if (!v.ok()) throw ConfigError("monitoring.points", "monitoring curve rejected: " + v.detail);
    return m;
  }
  throw ConfigError("monitoring.model", "unknown model '" + model + "' (rational, tabulated, perfect)");
}

TrafficMatrix parse_topology(const json& s, const fs::path& base) {
  const std::string p = "topology";
  if (!s.contains("generator")) throw ConfigError("topology.generator", "missing");
  const std::string gen = s.at("generator").get<std::string>();
  const std::string gfield = "topology.generator";
  auto lambda0 = [&] { return get_double(s, "lambda0", p, 1.0); };

  if (gen == "complete")
    return rethrow_as(gfield, [&] { return complete_graph(get_count(s, "n", p), lambda0()); });
  if (gen == "ring_lattice")
    return rethrow_as(gfield, [&] { return ring_lattice(get_count(s, "n", p), get_count(s, "d", p), lambda0()); });
  if (gen == "line") return rethrow_as(gfield, [&] { return line_graph(get_count(s, "n", p), lambda0()); });
  if (gen == "star") return rethrow_as(gfield, [&] { return star_graph(get_count(s, "n", p), lambda0()); });
  if (gen == "core_periphery")
    return rethrow_as(gfield, [&] { return core_periphery(get_count(s, "K", p), get_count(s, "l", p), lambda0()); });
  if (gen == "edge_list") {
    std::optional<std::size_t> n;
    if (s.contains("n")) n = get_count(s, "n", p);
    if (s.contains("file")) {
      const fs::path f = resolve(base, s.at("file").get<std::string>(), "topology.file");
      return rethrow_as("topology.file", [&] { return io::read_edge_csv(f, n); });
    }
    if (!s.contains("edges") || !s.at("edges").is_array())
      throw ConfigError("topology.edges", "edge_list needs 'file' or an 'edges' array");
    std::vector<topology::Edge> edges;
    std::size_t max_label = 0;
    for (const auto& e : s.at("edges")) {
      if (!e.is_array() || e.size() < 3 || e.size() > 4 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number() || e[0].get<long long>() < 1 || e[1].get<long long>() < 1)
        throw ConfigError("topology.edges", "each edge must be [i, j, rate] or [i, j, rate, directed] with labels >= 1");
      if (e.size() == 4 && !e[3].is_boolean() && !e[3].is_number_integer())
        throw ConfigError("topology.edges", "the directed flag must be true/false or 1/0");
      const auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>();
      max_label = std::max({max_label, a, b});
      const bool directed = e.size() == 4 && (e[3].is_boolean() ? e[3].get<bool>() : e[3].get<long long>() != 0);
      edges.push_back(topology::Edge{a - 1, b - 1, e[2].get<double>(), directed});
    }
    return rethrow_as("topology.edges", [&] { return from_edges(n.value_or(max_label), edges); });
  }
  if (gen == "matrix") {
    if (s.contains("file")) {
      const fs::path f = resolve(base, s.at("file").get<std::string>(), "topology.file");
      return rethrow_as("topology.file", [&] { return io::read_matrix_csv(f); });
    }
    if (!s.contains("rates") || !s.at("rates").is_array())
      throw ConfigError("topology.rates", "matrix needs 'file' or a 'rates' array of rows");
    const json& rows = s.at("rates");
    const std::size_t n = rows.size();
    std::vector<double> rates;
    for (const auto& r : rows) {
      if (!r.is_array() || r.size() != n) throw ConfigError("topology.rates", "must be a square array of numbers");
      for (const auto& x : r) {
        if (!x.is_number()) throw ConfigError("topology.rates", "must be a square array of numbers");
        rates.push_back(x.get<double>());
      }
    }
    return rethrow_as("topology.rates", [&] { return TrafficMatrix(n, rates); });
  }
  throw ConfigError(gfield, "unknown generator '" + gen +
                                "' (complete, ring_lattice, line, star, core_periphery, edge_list, matrix)");
}

RunConfig build_config(json doc, fs::path base_dir) {
  if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
  RunConfig cfg;
  cfg.base_dir = std::move(base_dir);
  cfg.doc = std::move(doc);
  cfg.env = parse_environment(cfg.section("environment"));
  cfg.mon = parse_monitoring(cfg.section("monitoring"), cfg.base_dir);
  if (cfg.doc.contains("topology")) cfg.tm = parse_topology(cfg.section("topology"), cfg.base_dir);
  if (cfg.doc.contains("seed")) {
    const json& s = cfg.doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (cfg.tm) (void)cfg.subset();  // validate early
  return cfg;
}

RunConfig load_config(const std::optional<fs::path>& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  fs::path base = fs::current_path();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config", "cannot open " + path->string());
    doc = json::parse(in, nullptr, false, /*ignore_comments=*/true);
    if (doc.is_discarded()) throw ConfigError("config", path->string() + " is not valid JSON");
    base = fs::absolute(*path).parent_path();
  }
  for (const auto& o : overrides) apply_override(doc, o);
  try {
    return build_config(std::move(doc), std::move(base));
  } catch (const json::exception& e) {
    throw ConfigError("config", e.what());
  }
}

}  // namespace mutualsec::cli
