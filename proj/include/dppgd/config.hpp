#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dppgd/errors.hpp"

namespace dppgd {

// Plain-text experiment description: `key = value` lines, '#' comments.
// Unknown keys are rejected so typos fail loudly.  The verbatim text is
// kept for provenance and embedded in every output sidecar.
struct ExperimentConfig {
  std::string name = "experiment";

  // problem
  std::string problem = "nesterov_nonsmooth";
  int dimension = 1;
  int n_agents = 10;
  std::uint64_t problem_seed = 7;
  double l_min = 0.5;
  double l_max = 1.5;

  // graph: fig1 | cycle | complete | random | file:<path>
  std::string graph = "fig1";
  std::uint64_t graph_seed = 1;
  double graph_edge_prob = 0.3;
  std::string weight_rule = "uniform";  // uniform | lazy

  // surplus gain: theory | practical | manual
  std::string epsilon_policy = "practical";
  double epsilon_value = 0.0;  // manual only

  // oracle
  std::string sampler = "gaussian";  // gaussian | ball_both | ball_mixed
  double p1 = 1.5;
  double p2 = 2.5;
  // when set, overrides p2 via beta2 = (1+k)^-(p1+b)
  std::optional<double> beta_ratio_b;

  // step size: power | constant | constant_horizon
  std::string alpha_schedule = "power";
  double alpha0 = 0.1;
  double alpha_exponent = 0.5;
  long alpha_horizon = 0;  // 0 means "use rounds"

  // constraint: whole_space | box | ball | halfspace
  std::string constraint = "box";
  double box_lo = -10.0;
  double box_hi = 10.0;
  std::vector<double> ball_center;  // empty means origin
  double ball_radius = 10.0;
  std::vector<double> halfspace_normal;
  double halfspace_offset = 0.0;

  // run
  long rounds = 10000;
  int repetitions = 10;
  std::uint64_t seed = 42;
  std::string x0_policy = "zeros";  // zeros | random | given
  std::vector<double> x0_value;
  std::string algorithm = "dppgd";  // dppgd | subgradient | centralized
  long record_stride = 0;           // 0 = auto
  bool per_agent_gaps = false;
  bool per_rep_files = false;
  bool stacked_check = false;  // track the stacked-form mirror deviation

  std::string output_dir;  // empty = resolve from environment / default

  // verbatim text this config was parsed from (canonical form when built
  // programmatically)
  std::string raw_text;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + value);
  }
}

inline long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + value);
  }
}

inline std::uint64_t parse_u64(const std::string& key,
                               const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key +
                      "': not an unsigned integer: " + value);
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false: " + value);
}

inline std::vector<double> parse_vector(const std::string& key,
                                        const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config key '" + key + "': empty vector entry");
    out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw ConfigError("config key '" + key + "': empty vector");
  return out;
}

inline std::string format_vector(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ",";
    out << v[i];
  }
  return out.str();
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.raw_text = text;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");

    if (key == "name") cfg.name = value;
    else if (key == "problem") cfg.problem = value;
    else if (key == "dimension") cfg.dimension = static_cast<int>(detail::parse_long(key, value));
    else if (key == "agents") cfg.n_agents = static_cast<int>(detail::parse_long(key, value));
    else if (key == "problem_seed") cfg.problem_seed = detail::parse_u64(key, value);
    else if (key == "l_min") cfg.l_min = detail::parse_double(key, value);
    else if (key == "l_max") cfg.l_max = detail::parse_double(key, value);
    else if (key == "graph") cfg.graph = value;
    else if (key == "graph_seed") cfg.graph_seed = detail::parse_u64(key, value);
    else if (key == "graph_edge_prob") cfg.graph_edge_prob = detail::parse_double(key, value);
    else if (key == "weight_rule") cfg.weight_rule = value;
    else if (key == "epsilon_policy") cfg.epsilon_policy = value;
    else if (key == "epsilon_value") cfg.epsilon_value = detail::parse_double(key, value);
    else if (key == "sampler") cfg.sampler = value;
    else if (key == "p1") cfg.p1 = detail::parse_double(key, value);
    else if (key == "p2") cfg.p2 = detail::parse_double(key, value);
    else if (key == "beta_ratio_b") cfg.beta_ratio_b = detail::parse_double(key, value);
    else if (key == "alpha_schedule") cfg.alpha_schedule = value;
    else if (key == "alpha0") cfg.alpha0 = detail::parse_double(key, value);
    else if (key == "alpha_exponent") cfg.alpha_exponent = detail::parse_double(key, value);
    else if (key == "alpha_horizon") cfg.alpha_horizon = detail::parse_long(key, value);
    else if (key == "constraint") cfg.constraint = value;
    else if (key == "box_lo") cfg.box_lo = detail::parse_double(key, value);
    else if (key == "box_hi") cfg.box_hi = detail::parse_double(key, value);
    else if (key == "ball_center") cfg.ball_center = detail::parse_vector(key, value);
    else if (key == "ball_radius") cfg.ball_radius = detail::parse_double(key, value);
    else if (key == "halfspace_normal") cfg.halfspace_normal = detail::parse_vector(key, value);
    else if (key == "halfspace_offset") cfg.halfspace_offset = detail::parse_double(key, value);
    else if (key == "rounds") cfg.rounds = detail::parse_long(key, value);
    else if (key == "repetitions") cfg.repetitions = static_cast<int>(detail::parse_long(key, value));
    else if (key == "seed") cfg.seed = detail::parse_u64(key, value);
    else if (key == "x0_policy") cfg.x0_policy = value;
    else if (key == "x0_value") cfg.x0_value = detail::parse_vector(key, value);
    else if (key == "algorithm") cfg.algorithm = value;
    else if (key == "record_stride") cfg.record_stride = detail::parse_long(key, value);
    else if (key == "per_agent_gaps") cfg.per_agent_gaps = detail::parse_bool(key, value);
    else if (key == "per_rep_files") cfg.per_rep_files = detail::parse_bool(key, value);
    else if (key == "stacked_check") cfg.stacked_check = detail::parse_bool(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// Canonical `key = value` rendering; parsing it back reproduces the config.
inline std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "name = " << cfg.name << "\n";
  out << "problem = " << cfg.problem << "\n";
  out << "dimension = " << cfg.dimension << "\n";
  out << "agents = " << cfg.n_agents << "\n";
  out << "problem_seed = " << cfg.problem_seed << "\n";
  out << "l_min = " << cfg.l_min << "\n";
  out << "l_max = " << cfg.l_max << "\n";
  out << "graph = " << cfg.graph << "\n";
  out << "graph_seed = " << cfg.graph_seed << "\n";
  out << "graph_edge_prob = " << cfg.graph_edge_prob << "\n";
  out << "weight_rule = " << cfg.weight_rule << "\n";
  out << "epsilon_policy = " << cfg.epsilon_policy << "\n";
  out << "epsilon_value = " << cfg.epsilon_value << "\n";
  out << "sampler = " << cfg.sampler << "\n";
  out << "p1 = " << cfg.p1 << "\n";
  out << "p2 = " << cfg.p2 << "\n";
  if (cfg.beta_ratio_b) out << "beta_ratio_b = " << *cfg.beta_ratio_b << "\n";
  out << "alpha_schedule = " << cfg.alpha_schedule << "\n";
  out << "alpha0 = " << cfg.alpha0 << "\n";
  out << "alpha_exponent = " << cfg.alpha_exponent << "\n";
  out << "alpha_horizon = " << cfg.alpha_horizon << "\n";
  out << "constraint = " << cfg.constraint << "\n";
  out << "box_lo = " << cfg.box_lo << "\n";
  out << "box_hi = " << cfg.box_hi << "\n";
  if (!cfg.ball_center.empty())
    out << "ball_center = " << detail::format_vector(cfg.ball_center) << "\n";
  out << "ball_radius = " << cfg.ball_radius << "\n";
  if (!cfg.halfspace_normal.empty())
    out << "halfspace_normal = " << detail::format_vector(cfg.halfspace_normal)
        << "\n";
  out << "halfspace_offset = " << cfg.halfspace_offset << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "repetitions = " << cfg.repetitions << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "x0_policy = " << cfg.x0_policy << "\n";
  if (!cfg.x0_value.empty())
    out << "x0_value = " << detail::format_vector(cfg.x0_value) << "\n";
  out << "algorithm = " << cfg.algorithm << "\n";
  out << "record_stride = " << cfg.record_stride << "\n";
  out << "per_agent_gaps = " << (cfg.per_agent_gaps ? "true" : "false") << "\n";
  out << "per_rep_files = " << (cfg.per_rep_files ? "true" : "false") << "\n";
  out << "stacked_check = " << (cfg.stacked_check ? "true" : "false") << "\n";
  if (!cfg.output_dir.empty()) out << "output_dir = " << cfg.output_dir << "\n";
  return out.str();
}

}  // namespace dppgd
