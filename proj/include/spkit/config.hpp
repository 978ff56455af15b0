#pragma once

// Hand-editable configuration files: `key = value` lines, '#' comments,
// `[section]` headers that prefix the keys that follow, and dotted keys
// (`sim.dt = 1e-3`) accepted anywhere. Values are scalars, names, booleans,
// or comma-separated number lists.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spkit/system.hpp"

namespace spkit {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message),
        field_name(field) {}
  std::string field_name;
};

class ConfigTable {
 public:
  static ConfigTable parse_string(const std::string& text) {
    ConfigTable t;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          throw ConfigError("line " + std::to_string(lineno),
                            "unterminated section header");
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno),
                          "expected 'key = value'");
      std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(lineno), "empty key");
      if (!section.empty()) key = section + "." + key;
      t.set(key, value);
    }
    return t;
  }

  static ConfigTable parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw ConfigError(path, "cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
  }

  void set(const std::string& key, const std::string& value) {
    const auto it = index_.find(key);
    if (it == index_.end()) {
      index_[key] = entries_.size();
      entries_.emplace_back(key, value);
    } else {
      entries_[it->second].second = value;
    }
  }

  bool has(const std::string& key) const { return index_.count(key) != 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback = "") const {
    const auto it = index_.find(key);
    return it == index_.end() ? fallback : entries_[it->second].second;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(key, get_string(key));
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = get_string(key);
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a nonnegative integer, got '" + s + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string s = get_string(key);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + s + "'");
  }

  VecX get_vector(const std::string& key, const VecX& fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      const std::string item =
          trim(s.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start));
      if (!item.empty()) vals.push_back(parse_double(key, item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    VecX v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = vals[i];
    return v;
  }

  // Flat dotted-key serialization; parses back to an identical table.
  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
    return os.str();
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  static std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return std::string(s);
  }

  static double parse_double(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + s + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

struct CheckFlags {
  bool certificate = false;
  bool conditions = false;
  bool ratio_sweep = false;
  bool derived_gain = false;
  bool decrease = false;
  bool steady_state = false;
  bool network = false;
  bool estimator = false;
  bool small_gain = false;  // custom curve-level checks
  bool sigma = false;
  bool ratio = false;
  std::size_t sample_count = 10000;
  int decrease_runs = 20;
};

struct RunExpectations {
  bool enabled = true;
  bool expect_converge = false;
  double target_tol = 1e-3;
  std::optional<VecX> target_x;
  std::optional<VecX> target_z;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  SimConfig sim;
  std::optional<VecX> x0, z0;
  CheckFlags checks;
  RunExpectations run;
  ConfigTable table;
};

inline const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> names = {
      "example1_saturated", "example2_feedback_opt", "integral_control",
      "source_seeking", "custom"};
  return names;
}

inline ScenarioConfig interpret_config(ConfigTable table) {
  ScenarioConfig cfg;
  cfg.scenario = table.get_string("scenario");
  if (cfg.scenario.empty())
    throw ConfigError("scenario", "missing (one of example1_saturated, "
                                  "example2_feedback_opt, integral_control, "
                                  "source_seeking, custom)");
  const auto& known = known_scenarios();
  if (std::find(known.begin(), known.end(), cfg.scenario) == known.end())
    throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");
  cfg.seed = table.get_uint("seed", 0);

  const std::string method = table.get_string("sim.method", "rk4");
  if (method == "rk4")
    cfg.sim.method = SimMethod::Rk4Fixed;
  else if (method == "rk45")
    cfg.sim.method = SimMethod::Rk45Adaptive;
  else
    throw ConfigError("sim.method", "expected rk4 or rk45, got '" + method +
                                        "'");
  cfg.sim.t_final = table.get_double("sim.t_final", 100.0);
  cfg.sim.dt = table.get_double("sim.dt", 1e-3);
  cfg.sim.rtol = table.get_double("sim.rtol", 1e-10);
  cfg.sim.atol = table.get_double("sim.atol", 1e-12);
  cfg.sim.divergence_radius = table.get_double("sim.divergence_radius", 1e8);
  cfg.sim.record_every =
      static_cast<int>(table.get_uint("sim.record_every", 100));
  if (!(cfg.sim.t_final > 0.0))
    throw ConfigError("sim.t_final", "must be positive");
  if (cfg.sim.method == SimMethod::Rk4Fixed && !(cfg.sim.dt > 0.0))
    throw ConfigError("sim.dt", "must be positive");
  if (cfg.sim.method == SimMethod::Rk45Adaptive &&
      (!(cfg.sim.rtol > 0.0) || !(cfg.sim.atol > 0.0)))
    throw ConfigError("sim.rtol", "rtol and atol must be positive");
  if (cfg.sim.record_every < 1)
    throw ConfigError("sim.record_every", "must be >= 1");
  if (!(cfg.sim.divergence_radius > 0.0))
    throw ConfigError("sim.divergence_radius", "must be positive");

  if (table.has("initial.x")) cfg.x0 = table.get_vector("initial.x", VecX());
  if (table.has("initial.z")) cfg.z0 = table.get_vector("initial.z", VecX());

  cfg.checks.certificate = table.get_bool("check.certificate", false);
  cfg.checks.conditions = table.get_bool("check.conditions", false);
  cfg.checks.ratio_sweep = table.get_bool("check.ratio_sweep", false);
  cfg.checks.derived_gain = table.get_bool("check.derived_gain", false);
  cfg.checks.decrease = table.get_bool("check.decrease", false);
  cfg.checks.steady_state = table.get_bool("check.steady_state", false);
  cfg.checks.network = table.get_bool("check.network", false);
  cfg.checks.estimator = table.get_bool("check.estimator", false);
  cfg.checks.small_gain = table.get_bool("check.small_gain", false);
  cfg.checks.sigma = table.get_bool("check.sigma", false);
  cfg.checks.ratio = table.get_bool("check.ratio", false);
  cfg.checks.sample_count = table.get_uint("check.sample_count", 10000);
  cfg.checks.decrease_runs =
      static_cast<int>(table.get_uint("check.decrease_runs", 20));

  cfg.run.enabled = table.get_bool("run.enabled", true);
  cfg.run.expect_converge = table.get_bool("run.expect_converge", false);
  cfg.run.target_tol = table.get_double("run.target_tol", 1e-3);
  if (table.has("run.target_x"))
    cfg.run.target_x = table.get_vector("run.target_x", VecX());
  if (table.has("run.target_z"))
    cfg.run.target_z = table.get_vector("run.target_z", VecX());

  cfg.table = std::move(table);
  return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
  return interpret_config(ConfigTable::parse_file(path));
}

}  // namespace spkit
