#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bfl/measure.hpp"
#include "bfl/weight.hpp"

namespace bfl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolved experiment configuration. Site probabilities and weights are
/// expanded to explicit per-site tables during parsing, so the rest of the
/// code never sees the shorthand forms.
struct ExperimentConfig {
  int n = 6;
  std::vector<double> p;       // length n
  std::vector<double> w;       // length n
  std::vector<double> t_grid = {0.1, 1.0};
  std::uint64_t seed = 12345;
  int n_paths = 10000;
  std::map<std::string, double> tolerances;

  double tolerance(std::string_view key, double fallback) const {
    const auto it = tolerances.find(std::string(key));
    return it == tolerances.end() ? fallback : it->second;
  }

  ParamsPtr make_params() const { return make_params_vec(p); }
  WeightFunction make_weight() const { return WeightFunction(w); }

  static ExperimentConfig defaults() {
    ExperimentConfig cfg;
    cfg.p.assign(std::size_t(cfg.n), 0.5);
    cfg.w.assign(std::size_t(cfg.n), 1.0);
    return cfg;
  }

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

 private:
  static ParamsPtr make_params_vec(std::vector<double> values) {
    return std::make_shared<const SiteParams>(std::move(values));
  }
};

namespace detail {

inline ConfigError config_error(const std::string& field, const std::string& what) {
  return ConfigError("config: field '" + field + "': " + what);
}

inline std::vector<double> resolve_site_values(const nlohmann::json& j, int n,
                                               const std::string& field,
                                               bool allow_affine) {
  std::vector<double> values;
  if (j.is_number()) {
    values.assign(std::size_t(n), j.get<double>());
  } else if (j.is_array()) {
    if (int(j.size()) != n) {
      throw config_error(field, "explicit table must have exactly n=" +
                                    std::to_string(n) + " entries, got " +
                                    std::to_string(j.size()));
    }
    for (const auto& e : j) {
      if (!e.is_number()) throw config_error(field, "table entries must be numbers");
      values.push_back(e.get<double>());
    }
  } else if (allow_affine && j.is_object()) {
    if (!j.contains("a") || !j.contains("b") || j.size() != 2 ||
        !j["a"].is_number() || !j["b"].is_number()) {
      throw config_error(field, "affine form must be {\"a\": <num>, \"b\": <num>}");
    }
    const double a = j["a"].get<double>();
    const double b = j["b"].get<double>();
    for (int k = 0; k < n; ++k) values.push_back(a * double(k) + b);
  } else {
    throw config_error(field, allow_affine
                                  ? "expected a number, an n-entry array, or {\"a\",\"b\"}"
                                  : "expected a number or an n-entry array");
  }
  return values;
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  static const char* known[] = {"n", "p", "w", "t_grid", "seed", "n_paths", "tolerances"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("config: unknown field '" + key + "'");
  }

  ExperimentConfig cfg;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer()) throw detail::config_error("n", "must be an integer");
    cfg.n = j["n"].get<int>();
  }
  if (cfg.n < 1 || cfg.n > kMaxSites) {
    throw detail::config_error("n", "must lie in [1, " + std::to_string(kMaxSites) + "]");
  }

  cfg.p = j.contains("p") ? detail::resolve_site_values(j["p"], cfg.n, "p", false)
                          : std::vector<double>(std::size_t(cfg.n), 0.5);
  for (std::size_t k = 0; k < cfg.p.size(); ++k) {
    if (!(cfg.p[k] > 0.0 && cfg.p[k] < 1.0)) {
      throw detail::config_error("p", "p[" + std::to_string(k) +
                                          "] must lie in the open interval (0,1)");
    }
  }

  cfg.w = j.contains("w") ? detail::resolve_site_values(j["w"], cfg.n, "w", true)
                          : std::vector<double>(std::size_t(cfg.n), 1.0);
  for (std::size_t k = 0; k < cfg.w.size(); ++k) {
    if (!(cfg.w[k] >= 0.0) || !std::isfinite(cfg.w[k])) {
      throw detail::config_error("w", "w[" + std::to_string(k) +
                                          "] must be finite and >= 0");
    }
  }

  if (j.contains("t_grid")) {
    if (!j["t_grid"].is_array() || j["t_grid"].empty()) {
      throw detail::config_error("t_grid", "must be a nonempty array of times");
    }
    cfg.t_grid.clear();
    for (const auto& e : j["t_grid"]) {
      if (!e.is_number()) throw detail::config_error("t_grid", "entries must be numbers");
      cfg.t_grid.push_back(e.get<double>());
    }
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
      if (!(cfg.t_grid[i] >= 0.0) || !std::isfinite(cfg.t_grid[i])) {
        throw detail::config_error("t_grid", "entries must be finite and >= 0");
      }
      if (i > 0 && cfg.t_grid[i] < cfg.t_grid[i - 1]) {
        throw detail::config_error("t_grid", "entries must be sorted ascending");
      }
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw detail::config_error("seed", "must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("n_paths")) {
    if (!j["n_paths"].is_number_integer()) {
      throw detail::config_error("n_paths", "must be an integer");
    }
    cfg.n_paths = j["n_paths"].get<int>();
    if (cfg.n_paths < 1) throw detail::config_error("n_paths", "must be >= 1");
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) {
      throw detail::config_error("tolerances", "must be an object of numbers");
    }
    for (const auto& [key, value] : j["tolerances"].items()) {
      if (!value.is_number()) {
        throw detail::config_error("tolerances", "'" + key + "' must be a number");
      }
      const double v = value.get<double>();
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw detail::config_error("tolerances", "'" + key + "' must be finite and >= 0");
      }
      cfg.tolerances[key] = v;
    }
  }
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace bfl
