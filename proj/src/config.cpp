#include "driftforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <yaml-cpp/yaml.h>

namespace driftforge {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "drift", "a",    "b",        "y0",         "T",  "T_list",     "reps",          "base_seed",
      "dt",    "rho",  "rho_exploratory", "d",    "n",          "beta_max",      "t_max",
      "quad_points", "quad_rule", "t0", "epsT",  "s_star",     "c_override",    "threads"};
  return keys;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: key '" + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: malformed YAML: ") + e.what());
  }
  if (root.IsNull()) return ExperimentConfig{};
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");

  ExperimentConfig cfg;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known_keys().contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    const YAML::Node& v = kv.second;

    if (key == "drift") {
      try {
        cfg.drift = drift_from_label(scalar<std::string>(v, key));
      } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else if (key == "a") {
      cfg.a = scalar<double>(v, key);
    } else if (key == "b") {
      cfg.b = scalar<double>(v, key);
    } else if (key == "y0") {
      cfg.y0 = scalar<double>(v, key);
    } else if (key == "T") {
      if (std::as_const(root)["T_list"]) throw ConfigError("config: give either T or T_list, not both");
      cfg.T_list = {scalar<double>(v, key)};
    } else if (key == "T_list") {
      if (v.IsScalar()) {
        cfg.T_list = {scalar<double>(v, key)};
      } else if (v.IsSequence()) {
        cfg.T_list = scalar<std::vector<double>>(v, key);
      } else {
        throw ConfigError("config: T_list must be a number or a list");
      }
    } else if (key == "reps") {
      cfg.reps = scalar<int>(v, key);
    } else if (key == "base_seed") {
      cfg.base_seed = scalar<std::uint64_t>(v, key);
    } else if (key == "dt") {
      cfg.dt = scalar<double>(v, key);
    } else if (key == "rho") {
      cfg.rho = scalar<double>(v, key);
    } else if (key == "rho_exploratory") {
      cfg.rho_exploratory = scalar<bool>(v, key);
    } else if (key == "d") {
      cfg.d = scalar<int>(v, key);
    } else if (key == "n") {
      cfg.n = scalar<int>(v, key);
    } else if (key == "beta_max") {
      cfg.beta_max = scalar<int>(v, key);
    } else if (key == "t_max") {
      cfg.t_max = scalar<int>(v, key);
    } else if (key == "quad_points") {
      cfg.quad_points = scalar<int>(v, key);
    } else if (key == "quad_rule") {
      const auto rule = scalar<std::string>(v, key);
      if (rule == "midpoint") {
        cfg.quad_rule = QuadratureRule::midpoint;
      } else if (rule == "trapezoid") {
        cfg.quad_rule = QuadratureRule::trapezoid;
      } else {
        throw ConfigError("config: quad_rule must be midpoint or trapezoid");
      }
    } else if (key == "t0") {
      cfg.t0 = scalar<double>(v, key);
    } else if (key == "epsT") {
      cfg.epsT = scalar<double>(v, key);
    } else if (key == "s_star") {
      cfg.s_star = scalar<double>(v, key);
    } else if (key == "c_override") {
      cfg.c_override = scalar<double>(v, key);
    } else if (key == "threads") {
      cfg.threads = scalar<int>(v, key);
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string read_config_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_config_text(path)); }

std::string schedule_yaml(const Schedule& schedule, double a, double b) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "T" << YAML::Value << schedule.T;
  out << YAML::Key << "t0" << YAML::Value << schedule.t0;
  out << YAML::Key << "epsT" << YAML::Value << schedule.epsT;
  out << YAML::Key << "n" << YAML::Value << schedule.n;
  out << YAML::Key << "a" << YAML::Value << a;
  out << YAML::Key << "b" << YAML::Value << b;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace driftforge
