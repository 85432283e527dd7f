#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dppgd/baselines.hpp"
#include "dppgd/config.hpp"
#include "dppgd/core.hpp"
#include "dppgd/errors.hpp"
#include "dppgd/graph.hpp"
#include "dppgd/metrics.hpp"
#include "dppgd/problems.hpp"
#include "dppgd/projection.hpp"
#include "dppgd/schedule.hpp"
#include "dppgd/spectral.hpp"
#include "dppgd/weights.hpp"

namespace dppgd {

// Seed stream tags: each repetition derives its own seed from the master,
// and each consumer (oracle, initializer) derives its own from that.
constexpr std::uint64_t kRepSeedTag = 500;
constexpr std::uint64_t kOracleSeedTag = 1;
constexpr std::uint64_t kInitSeedTag = 2;
constexpr std::uint64_t kGraphSeedTag = 3;

// Everything a run needs, resolved once per experiment.
struct ExperimentSetup {
  Problem problem;
  DirectedGraph graph;
  WeightMatrices weights;  // augmented with the chosen epsilon
  SpectralReport spectra;
  std::string epsilon_warning;  // empty when the chosen epsilon is provable
  ConstraintSet set;
  StepSchedule steps{};
  SmoothingSchedule smoothing;
  ReferenceSolution reference;
};

namespace detail {

inline WeightRule parse_weight_rule(const std::string& s) {
  if (s == "uniform") return WeightRule::uniform;
  if (s == "lazy") return WeightRule::lazy;
  throw ConfigError("unknown weight_rule '" + s + "'");
}

inline SamplerMode parse_sampler(const std::string& s) {
  if (s == "gaussian") return SamplerMode::gaussian;
  if (s == "ball_both") return SamplerMode::ball_both;
  if (s == "ball_mixed") return SamplerMode::ball_mixed;
  throw ConfigError("unknown sampler '" + s + "'");
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// scalars broadcast to the full dimension; otherwise sizes must match
inline Eigen::VectorXd to_eigen_broadcast(const std::vector<double>& v,
                                          int dimension,
                                          const std::string& what) {
  if (static_cast<int>(v.size()) == dimension) return to_eigen(v);
  if (v.size() == 1)
    return Eigen::VectorXd::Constant(dimension, v[0]);
  throw ConfigError(what + ": expected 1 or " + std::to_string(dimension) +
                    " entries, got " + std::to_string(v.size()));
}

inline DirectedGraph resolve_graph(const ExperimentConfig& cfg) {
  if (cfg.graph == "fig1") {
    if (cfg.n_agents != 10)
      throw ConfigError("graph 'fig1' is a 10-node graph; agents = " +
                        std::to_string(cfg.n_agents));
    return fig1_graph();
  }
  if (cfg.graph == "cycle") return cycle_graph(cfg.n_agents);
  if (cfg.graph == "complete") return complete_graph(cfg.n_agents);
  if (cfg.graph == "random") {
    RngStream rng(derive_seed(cfg.graph_seed, kGraphSeedTag));
    return random_strongly_connected(cfg.n_agents, cfg.graph_edge_prob, rng);
  }
  if (cfg.graph.rfind("file:", 0) == 0) {
    DirectedGraph g = load_edge_list(cfg.graph.substr(5));
    if (g.node_count != cfg.n_agents)
      throw ConfigError("graph file has " + std::to_string(g.node_count) +
                        " nodes but agents = " + std::to_string(cfg.n_agents));
    return g;
  }
  throw ConfigError("unknown graph '" + cfg.graph + "'");
}

inline ConstraintSet resolve_constraint(const ExperimentConfig& cfg) {
  const int n = cfg.dimension;
  if (cfg.constraint == "whole_space") return ConstraintSet::whole_space(n);
  if (cfg.constraint == "box")
    return ConstraintSet::uniform_box(n, cfg.box_lo, cfg.box_hi);
  if (cfg.constraint == "ball") {
    const Eigen::VectorXd center =
        cfg.ball_center.empty()
            ? Eigen::VectorXd::Zero(n)
            : to_eigen_broadcast(cfg.ball_center, n, "ball_center");
    return ConstraintSet::ball(center, cfg.ball_radius);
  }
  if (cfg.constraint == "halfspace") {
    if (cfg.halfspace_normal.empty())
      throw ConfigError("constraint 'halfspace' needs halfspace_normal");
    return ConstraintSet::halfspace(
        to_eigen_broadcast(cfg.halfspace_normal, n, "halfspace_normal"),
        cfg.halfspace_offset);
  }
  throw ConfigError("unknown constraint '" + cfg.constraint + "'");
}

inline StepSchedule resolve_steps(const ExperimentConfig& cfg) {
  if (cfg.alpha_schedule == "power")
    return StepSchedule::power(cfg.alpha0, cfg.alpha_exponent);
  if (cfg.alpha_schedule == "constant")
    return StepSchedule::constant(cfg.alpha0);
  if (cfg.alpha_schedule == "constant_horizon")
    return StepSchedule::constant_horizon(
        cfg.alpha0, cfg.alpha_horizon > 0 ? cfg.alpha_horizon : cfg.rounds);
  throw ConfigError("unknown alpha_schedule '" + cfg.alpha_schedule + "'");
}

inline SmoothingSchedule resolve_smoothing(const ExperimentConfig& cfg) {
  if (cfg.beta_ratio_b)
    return SmoothingSchedule::power_ratio(cfg.p1, *cfg.beta_ratio_b);
  return SmoothingSchedule::power(cfg.p1, cfg.p2);
}

inline EpsilonPolicy resolve_epsilon_policy(const ExperimentConfig& cfg) {
  if (cfg.epsilon_policy == "theory") return EpsilonPolicy::theory();
  if (cfg.epsilon_policy == "practical") return EpsilonPolicy::practical();
  if (cfg.epsilon_policy == "manual")
    return EpsilonPolicy::manual(cfg.epsilon_value);
  throw ConfigError("unknown epsilon_policy '" + cfg.epsilon_policy + "'");
}

// Collapses the multi-agent problem to a single agent holding the summed
// cost; used by the centralized baseline so the same machinery runs it.
inline Problem centralize(const Problem& p) {
  Problem c;
  c.name = p.name + "_centralized";
  c.dimension = p.dimension;
  c.n_agents = 1;
  LocalCost sum;
  sum.dimension = p.dimension;
  std::vector<LocalCost> locals = p.locals;
  sum.value = [locals](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const LocalCost& lc : locals) v += lc.value(x);
    return v;
  };
  bool all_sub = true;
  for (const LocalCost& lc : locals) all_sub = all_sub && lc.has_subgradient();
  if (all_sub) {
    const int dim = p.dimension;
    sum.subgradient = [locals, dim](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
      for (const LocalCost& lc : locals) g += lc.subgradient(x);
      return g;
    };
  }
  c.locals.push_back(std::move(sum));
  c.analytic_optimal_value = p.analytic_optimal_value;
  c.analytic_optimizer = p.analytic_optimizer;
  c.coefficients = p.coefficients;
  return c;
}

}  // namespace detail

// Resolves a config into runnable components.  override_graph, when given,
// replaces the config's graph spec (used when regenerating a run from its
// sidecar, whose embedded edge list is authoritative).
inline ExperimentSetup resolve(const ExperimentConfig& cfg,
                               const DirectedGraph* override_graph = nullptr) {
  if (cfg.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (cfg.algorithm != "dppgd" && cfg.algorithm != "subgradient" &&
      cfg.algorithm != "centralized")
    throw ConfigError("unknown algorithm '" + cfg.algorithm + "'");

  ExperimentSetup setup;
  setup.problem = make_problem(cfg.problem, cfg.dimension, cfg.n_agents,
                               cfg.problem_seed, cfg.l_min, cfg.l_max);
  setup.graph = override_graph ? *override_graph : detail::resolve_graph(cfg);
  if (cfg.algorithm == "centralized") {
    setup.problem = detail::centralize(setup.problem);
    setup.graph = complete_graph(1);
  }

  WeightMatrices base =
      build_weights(setup.graph, detail::parse_weight_rule(cfg.weight_rule));
  const SpectralReport at_zero = spectral_analysis(augment(base, 0.0));
  const double eps = pick_epsilon(base, at_zero,
                                  detail::resolve_epsilon_policy(cfg),
                                  &setup.epsilon_warning);
  setup.weights = augment(base, eps);
  setup.spectra = spectral_analysis(setup.weights);

  setup.set = detail::resolve_constraint(cfg);
  setup.steps = detail::resolve_steps(cfg);
  setup.smoothing = detail::resolve_smoothing(cfg);
  setup.reference = solve_reference(setup.problem, setup.set);
  return setup;
}

struct RepetitionResult {
  MetricsTrace trace;
  NetworkState final_state;
  double max_stacked_deviation = 0.0;  // only tracked when enabled
};

namespace detail {

inline long auto_stride(long rounds) {
  if (rounds <= 10000) return 1;
  return (rounds + 9999) / 10000;
}

inline InitOptions resolve_init(const ExperimentConfig& cfg,
                                std::uint64_t rep_seed, int dimension) {
  InitOptions opts;
  opts.seed = derive_seed(rep_seed, kInitSeedTag);
  if (cfg.x0_policy == "zeros") {
    opts.policy = X0Policy::zeros;
  } else if (cfg.x0_policy == "random") {
    opts.policy = X0Policy::random_in_set;
  } else if (cfg.x0_policy == "given") {
    if (cfg.x0_value.empty())
      throw ConfigError("x0_policy 'given' needs x0_value");
    opts.policy = X0Policy::given;
    opts.given = to_eigen_broadcast(cfg.x0_value, dimension, "x0_value");
  } else {
    throw ConfigError("unknown x0_policy '" + cfg.x0_policy + "'");
  }
  return opts;
}

}  // namespace detail

// Runs one repetition: T rounds with metrics recorded every `stride` rounds
// (always including rounds 0 and T).  Step errors (divergence, non-finite
// costs) propagate to the caller with their round index.
inline RepetitionResult run_single(const ExperimentSetup& setup,
                                   const ExperimentConfig& cfg, int rep) {
  const std::uint64_t rep_seed = derive_seed(cfg.seed, kRepSeedTag + rep);
  const int n_agents = setup.problem.n_agents;
  const int dim = setup.problem.dimension;
  const double f_star = setup.reference.f_star;
  const long stride = cfg.record_stride > 0 ? cfg.record_stride
                                            : detail::auto_stride(cfg.rounds);
  const bool smoothing_active = cfg.algorithm != "subgradient";

  PseudoGradientOracle oracle(setup.problem.locals,
                              detail::parse_sampler(cfg.sampler),
                              setup.smoothing,
                              derive_seed(rep_seed, kOracleSeedTag));

  RepetitionResult result;
  MetricsTrace& trace = result.trace;
  if (cfg.per_agent_gaps) trace.per_agent_gap.resize(n_agents);

  NetworkState state =
      init(n_agents, dim, setup.set, setup.steps,
           detail::resolve_init(cfg, rep_seed, dim));

  const auto record = [&](const NetworkState& s, double incoming_g) {
    trace.rounds.push_back(s.round);
    trace.alpha.push_back(setup.steps.alpha(s.round));
    trace.beta1.push_back(smoothing_active ? setup.smoothing.beta1(s.round)
                                           : 0.0);
    trace.beta_tilde.push_back(
        smoothing_active ? setup.smoothing.beta_tilde(s.round) : 0.0);
    const Eigen::VectorXd mean = s.z_bar();
    trace.gap_bar.push_back(setup.problem.global(mean) - f_star);
    double gap_sum = 0.0;
    for (int i = 0; i < n_agents; ++i) {
      const double gap = setup.problem.global(s.agents[i].x_hat) - f_star;
      gap_sum += gap;
      if (cfg.per_agent_gaps) trace.per_agent_gap[i].push_back(gap);
    }
    trace.gap_hat.push_back(gap_sum / n_agents);
    double worst_consensus = 0.0, worst_surplus = 0.0;
    for (const AgentState& a : s.agents) {
      worst_consensus = std::max(worst_consensus, (a.x - mean).norm());
      worst_surplus = std::max(worst_surplus, a.y.norm());
    }
    trace.consensus.push_back(worst_consensus);
    trace.surplus.push_back(worst_surplus);
    trace.aggregated_g.push_back(incoming_g);
  };

  record(state, 0.0);
  for (long k = 0; k < cfg.rounds; ++k) {
    StepResult step_result =
        cfg.algorithm == "subgradient"
            ? distributed_subgradient_step(state, setup.weights,
                                           setup.problem.locals, setup.steps,
                                           setup.set)
            : step(state, setup.weights, oracle, setup.steps, setup.set);
    if (cfg.stacked_check)
      result.max_stacked_deviation =
          std::max(result.max_stacked_deviation,
                   stacked_deviation(state, step_result, setup.weights));
    state = std::move(step_result.state);
    if (state.round % stride == 0 || state.round == cfg.rounds)
      record(state, step_result.aggregated_g_norm);
  }
  result.final_state = std::move(state);
  return result;
}

struct ExperimentResult {
  ExperimentSetup setup;
  MetricsTrace mean_trace;  // metric columns averaged over repetitions
  std::vector<RepetitionResult> repetitions;
};

namespace detail {

inline MetricsTrace average_traces(const std::vector<RepetitionResult>& reps) {
  MetricsTrace mean = reps.at(0).trace;  // rounds/alpha/beta shared
  const auto n_rows = mean.size();
  const double r = static_cast<double>(reps.size());
  const auto avg = [&](std::vector<double> MetricsTrace::* column) {
    for (std::size_t row = 0; row < n_rows; ++row) {
      double sum = 0.0;
      for (const RepetitionResult& rep : reps)
        sum += (rep.trace.*column)[row];
      (mean.*column)[row] = sum / r;
    }
  };
  avg(&MetricsTrace::gap_hat);
  avg(&MetricsTrace::gap_bar);
  avg(&MetricsTrace::consensus);
  avg(&MetricsTrace::surplus);
  avg(&MetricsTrace::aggregated_g);
  for (std::size_t i = 0; i < mean.per_agent_gap.size(); ++i)
    for (std::size_t row = 0; row < n_rows; ++row) {
      double sum = 0.0;
      for (const RepetitionResult& rep : reps)
        sum += rep.trace.per_agent_gap[i][row];
      mean.per_agent_gap[i][row] = sum / r;
    }
  return mean;
}

}  // namespace detail

inline ExperimentResult run_experiment(
    const ExperimentConfig& cfg, const DirectedGraph* override_graph = nullptr) {
  ExperimentResult result;
  result.setup = resolve(cfg, override_graph);
  result.repetitions.reserve(cfg.repetitions);
  for (int rep = 0; rep < cfg.repetitions; ++rep)
    result.repetitions.push_back(run_single(result.setup, cfg, rep));
  result.mean_trace = detail::average_traces(result.repetitions);
  return result;
}

// ---- sweeps -------------------------------------------------------------

struct SweepEntry {
  std::string label;
  double value = 0.0;
  ExperimentConfig config;
  ExperimentResult result;
};

namespace detail {

inline std::string short_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", v);
  return buffer;
}

}  // namespace detail

// Step-size study: decay exponents a in {0, 0.2, 0.5, 0.7, 1} with
// alpha_k = 0.1 / (k+1)^a and the default smoothing exponents.
inline std::vector<SweepEntry> sweep_stepsize(const ExperimentConfig& base) {
  std::vector<SweepEntry> entries;
  for (double a : {0.0, 0.2, 0.5, 0.7, 1.0}) {
    SweepEntry entry;
    entry.value = a;
    entry.label = "a=" + detail::short_number(a);
    entry.config = base;
    entry.config.alpha_schedule = "power";
    entry.config.alpha0 = 0.1;
    entry.config.alpha_exponent = a;
    entry.config.p1 = 1.5;
    entry.config.p2 = 2.5;
    entry.config.beta_ratio_b.reset();
    entry.config.name = base.name + "_a" + detail::short_number(a);
    entry.config.raw_text = config_to_text(entry.config);
    entry.result = run_experiment(entry.config);
    entries.push_back(std::move(entry));
  }
  return entries;
}

// Smoothing-ratio study: beta_tilde_k = (1+k)^-b for b in {1, 3, 5, 7, 9}
// with alpha_k = 0.1 / sqrt(k+1).
inline std::vector<SweepEntry> sweep_beta(const ExperimentConfig& base) {
  std::vector<SweepEntry> entries;
  for (double b : {1.0, 3.0, 5.0, 7.0, 9.0}) {
    SweepEntry entry;
    entry.value = b;
    entry.label = "b=" + detail::short_number(b);
    entry.config = base;
    entry.config.alpha_schedule = "power";
    entry.config.alpha0 = 0.1;
    entry.config.alpha_exponent = 0.5;
    entry.config.p1 = 1.5;
    entry.config.beta_ratio_b = b;
    entry.config.name = base.name + "_b" + detail::short_number(b);
    entry.config.raw_text = config_to_text(entry.config);
    entry.result = run_experiment(entry.config);
    entries.push_back(std::move(entry));
  }
  return entries;
}

struct BaselineComparison {
  SweepEntry gradient_free;  // the two-point method
  SweepEntry subgradient;    // first-order distributed baseline
};

// Runs the gradient-free method and the distributed subgradient baseline on
// the same problem, graph, schedules, and seed family.
inline BaselineComparison compare_baselines(const ExperimentConfig& base) {
  BaselineComparison cmp;
  cmp.gradient_free.label = "dppgd";
  cmp.gradient_free.config = base;
  cmp.gradient_free.config.algorithm = "dppgd";
  cmp.gradient_free.config.name = base.name + "_dppgd";
  cmp.gradient_free.config.raw_text = config_to_text(cmp.gradient_free.config);
  cmp.gradient_free.result = run_experiment(cmp.gradient_free.config);

  cmp.subgradient.label = "subgradient";
  cmp.subgradient.config = base;
  cmp.subgradient.config.algorithm = "subgradient";
  cmp.subgradient.config.name = base.name + "_subgradient";
  cmp.subgradient.config.raw_text = config_to_text(cmp.subgradient.config);
  cmp.subgradient.result = run_experiment(cmp.subgradient.config);
  return cmp;
}

// ---- output -------------------------------------------------------------

inline std::string default_output_dir() {
  if (const char* env = std::getenv("DPPGD_OUT_DIR"); env && *env)
    return env;
  return "runs";
}

namespace detail {

inline void append_g17(std::string& out, double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  out += buffer;
}

}  // namespace detail

// CSV with one row per recorded round; doubles rendered with %.17g so a
// rerun of the same config and seed reproduces the file byte for byte.
inline std::string trace_to_csv(const MetricsTrace& trace) {
  std::string out =
      "round,alpha,beta1,beta_tilde,gap_hat,gap_bar,consensus,surplus,G_k";
  for (std::size_t i = 0; i < trace.per_agent_gap.size(); ++i)
    out += ",gap_agent_" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t row = 0; row < trace.size(); ++row) {
    out += std::to_string(trace.rounds[row]);
    for (const auto* column :
         {&trace.alpha, &trace.beta1, &trace.beta_tilde, &trace.gap_hat,
          &trace.gap_bar, &trace.consensus, &trace.surplus,
          &trace.aggregated_g}) {
      out += ',';
      detail::append_g17(out, (*column)[row]);
    }
    for (const auto& agent_column : trace.per_agent_gap) {
      out += ',';
      detail::append_g17(out, agent_column[row]);
    }
    out += '\n';
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("failed writing file: " + path);
}

inline MetricsTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV: " + path);
  std::vector<std::string> header;
  {
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) header.push_back(field);
  }
  const auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw IoError("CSV missing column '" + name + "': " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t idx_round = column_index("round");
  const std::size_t idx_alpha = column_index("alpha");
  const std::size_t idx_beta1 = column_index("beta1");
  const std::size_t idx_bt = column_index("beta_tilde");
  const std::size_t idx_gh = column_index("gap_hat");
  const std::size_t idx_gb = column_index("gap_bar");
  const std::size_t idx_cons = column_index("consensus");
  const std::size_t idx_sur = column_index("surplus");
  const std::size_t idx_g = column_index("G_k");
  std::vector<std::size_t> agent_columns;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i].rfind("gap_agent_", 0) == 0) agent_columns.push_back(i);

  MetricsTrace trace;
  trace.per_agent_gap.resize(agent_columns.size());
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::istringstream parts(line);
    std::string field;
    while (std::getline(parts, field, ',')) fields.push_back(field);
    if (fields.size() != header.size())
      throw IoError("CSV row width mismatch: " + path);
    trace.rounds.push_back(std::stol(fields[idx_round]));
    trace.alpha.push_back(std::stod(fields[idx_alpha]));
    trace.beta1.push_back(std::stod(fields[idx_beta1]));
    trace.beta_tilde.push_back(std::stod(fields[idx_bt]));
    trace.gap_hat.push_back(std::stod(fields[idx_gh]));
    trace.gap_bar.push_back(std::stod(fields[idx_gb]));
    trace.consensus.push_back(std::stod(fields[idx_cons]));
    trace.surplus.push_back(std::stod(fields[idx_sur]));
    trace.aggregated_g.push_back(std::stod(fields[idx_g]));
    for (std::size_t a = 0; a < agent_columns.size(); ++a)
      trace.per_agent_gap[a].push_back(std::stod(fields[agent_columns[a]]));
  }
  return trace;
}

namespace detail {

inline nlohmann::json state_to_json(const NetworkState& s) {
  nlohmann::json j;
  j["round"] = s.round;
  j["alpha_sum"] = s.alpha_sum;
  auto matrix = [&](auto member) {
    nlohmann::json rows = nlohmann::json::array();
    for (const AgentState& a : s.agents) {
      const Eigen::VectorXd& v = a.*member;
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index d = 0; d < v.size(); ++d) row.push_back(v[d]);
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["x"] = matrix(&AgentState::x);
  j["y"] = matrix(&AgentState::y);
  j["x_hat"] = matrix(&AgentState::x_hat);
  return j;
}

}  // namespace detail

// JSON sidecar carrying everything needed to regenerate or audit the CSV:
// the verbatim config text, the resolved graph, the chosen epsilon and its
// spectral diagnostics, the reference optimum, and per-repetition terminal
// states.
inline nlohmann::json make_sidecar(const ExperimentConfig& cfg,
                                   const ExperimentResult& result,
                                   const std::string& csv_filename) {
  const ExperimentSetup& setup = result.setup;
  nlohmann::json j;
  j["format"] = "dppgd-run-sidecar-v1";
  j["config_text"] =
      cfg.raw_text.empty() ? config_to_text(cfg) : cfg.raw_text;
  j["seed"] = cfg.seed;
  j["algorithm"] = cfg.algorithm;
  j["csv"] = csv_filename;
  j["graph_edge_list"] = format_edge_list(setup.graph);
  j["epsilon"] = setup.weights.epsilon;
  j["epsilon_warning"] = setup.epsilon_warning;
  j["spectral"] = {
      {"lambda2_mag_at_zero", setup.spectra.lambda2_mag_at_zero},
      {"lambda3_mag_at_zero", setup.spectra.lambda3_mag_at_zero},
      {"epsilon_bar", setup.spectra.epsilon_bar},
      {"lambda2_mag_at_eps", setup.spectra.lambda2_mag_at_eps},
      {"gamma_bound", setup.spectra.gamma_bound},
      {"gamma_fitted", setup.spectra.gamma_fitted},
      {"Gamma_fitted", setup.spectra.Gamma_fitted},
      {"fit_r_squared", setup.spectra.fit_r_squared},
      {"fit_points", setup.spectra.fit_points},
  };
  j["f_star"] = setup.reference.f_star;
  j["reference_exact"] = setup.reference.exact;
  j["reference_converged"] = setup.reference.converged;
  j["problem_coefficients"] = setup.problem.coefficients;
  nlohmann::json terminals = nlohmann::json::array();
  for (const RepetitionResult& rep : result.repetitions)
    terminals.push_back(detail::state_to_json(rep.final_state));
  j["terminal_states"] = std::move(terminals);
  if (cfg.stacked_check) {
    double worst = 0.0;
    for (const RepetitionResult& rep : result.repetitions)
      worst = std::max(worst, rep.max_stacked_deviation);
    j["max_stacked_deviation"] = worst;
  }
  return j;
}

struct WrittenOutputs {
  std::string csv_path;
  std::string sidecar_path;
  std::vector<std::string> per_rep_paths;
};

inline WrittenOutputs write_experiment_outputs(const ExperimentConfig& cfg,
                                               const ExperimentResult& result,
                                               const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  WrittenOutputs written;
  const std::string csv_name = cfg.name + ".csv";
  written.csv_path = (fs::path(dir) / csv_name).string();
  write_file(written.csv_path, trace_to_csv(result.mean_trace));
  if (cfg.per_rep_files) {
    for (std::size_t rep = 0; rep < result.repetitions.size(); ++rep) {
      const std::string rep_name =
          cfg.name + "_rep" + std::to_string(rep) + ".csv";
      const std::string path = (fs::path(dir) / rep_name).string();
      write_file(path, trace_to_csv(result.repetitions[rep].trace));
      written.per_rep_paths.push_back(path);
    }
  }
  written.sidecar_path = (fs::path(dir) / (cfg.name + ".json")).string();
  write_file(written.sidecar_path,
             make_sidecar(cfg, result, csv_name).dump(2) + "\n");
  return written;
}

// Re-runs an experiment from its sidecar alone.  The embedded edge list is
// used verbatim, so the regeneration works even when the original graph
// file is gone.
inline ExperimentResult run_from_sidecar(const nlohmann::json& sidecar,
                                         ExperimentConfig* config_out = nullptr) {
  if (!sidecar.contains("config_text"))
    throw ConfigError("sidecar missing config_text");
  const ExperimentConfig cfg =
      parse_config_text(sidecar["config_text"].get<std::string>());
  if (config_out) *config_out = cfg;
  std::optional<DirectedGraph> graph;
  if (sidecar.contains("graph_edge_list") && cfg.algorithm != "centralized")
    graph = parse_edge_list(sidecar["graph_edge_list"].get<std::string>());
  return run_experiment(cfg, graph ? &*graph : nullptr);
}

// ---- chart --------------------------------------------------------------

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal SVG line chart with optionally log-scaled axes; non-positive
// values are skipped on log axes.  Meant for quick visual inspection of
// sweep results, not publication.
inline std::string render_svg_chart(const std::vector<ChartSeries>& series,
                                    const std::string& title,
                                    const std::string& x_label,
                                    const std::string& y_label,
                                    bool log_x = true, bool log_y = true) {
  const int width = 860, height = 560;
  const int margin_left = 70, margin_right = 180, margin_top = 50,
            margin_bottom = 55;
  const double plot_w = width - margin_left - margin_right;
  const double plot_h = height - margin_top - margin_bottom;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool any = false;
  auto consider = [&](double vx, double vy) {
    if (log_x && !(vx > 0.0)) return;
    if (log_y && !(vy > 0.0)) return;
    const double tx = log_x ? std::log10(vx) : vx;
    const double ty = log_y ? std::log10(vy) : vy;
    if (!std::isfinite(tx) || !std::isfinite(ty)) return;
    if (!any) {
      x_min = x_max = tx;
      y_min = y_max = ty;
      any = true;
    } else {
      x_min = std::min(x_min, tx);
      x_max = std::max(x_max, tx);
      y_min = std::min(y_min, ty);
      y_max = std::max(y_max, ty);
    }
  };
  for (const ChartSeries& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      consider(s.x[i], s.y[i]);
  if (!any) {
    x_min = y_min = 0;
    x_max = y_max = 1;
  }
  if (x_max - x_min < 1e-12) x_max = x_min + 1;
  if (y_max - y_min < 1e-12) y_max = y_min + 1;

  const auto px = [&](double tx) {
    return margin_left + (tx - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py = [&](double ty) {
    return margin_top + (y_max - ty) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  svg << "<rect x=\"" << margin_left << "\" y=\"" << margin_top
      << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // decade (or linear) gridlines and tick labels
  const auto grid_positions = [](double lo, double hi, bool log_axis) {
    std::vector<double> ticks;
    if (log_axis) {
      for (double d = std::ceil(lo); d <= std::floor(hi) + 1e-9; d += 1.0)
        ticks.push_back(d);
    } else {
      const double span = hi - lo;
      const double raw = span / 6.0;
      const double mag = std::pow(10.0, std::floor(std::log10(raw)));
      double step = mag;
      if (raw / mag > 5)
        step = 10 * mag;
      else if (raw / mag > 2)
        step = 5 * mag;
      else if (raw / mag > 1)
        step = 2 * mag;
      for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9; t += step)
        ticks.push_back(t);
    }
    return ticks;
  };
  svg.precision(6);
  for (double t : grid_positions(x_min, x_max, log_x)) {
    const double x = px(t);
    svg << "<line x1=\"" << x << "\" y1=\"" << margin_top << "\" x2=\"" << x
        << "\" y2=\"" << margin_top + plot_h
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << margin_top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << (log_x ? "1e" + detail::short_number(t) : detail::short_number(t))
        << "</text>\n";
  }
  for (double t : grid_positions(y_min, y_max, log_y)) {
    const double y = py(t);
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\""
        << margin_left + plot_w << "\" y2=\"" << y
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << (log_y ? "1e" + detail::short_number(t) : detail::short_number(t))
        << "</text>\n";
  }
  svg << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\""
      << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << margin_top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << margin_top + plot_h / 2 << ")\">" << y_label << "</text>\n";

  int color = 0;
  int legend_row = 0;
  for (const ChartSeries& s : series) {
    const char* stroke = palette[color % 8];
    ++color;
    svg << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (log_x && !(s.x[i] > 0.0)) continue;
      if (log_y && !(s.y[i] > 0.0)) continue;
      const double tx = log_x ? std::log10(s.x[i]) : s.x[i];
      const double ty = log_y ? std::log10(s.y[i]) : s.y[i];
      if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
      svg << px(tx) << "," << py(ty) << " ";
    }
    svg << "\"/>\n";
    const double ly = margin_top + 14 + 18 * legend_row++;
    svg << "<line x1=\"" << margin_left + plot_w + 12 << "\" y1=\"" << ly
        << "\" x2=\"" << margin_left + plot_w + 34 << "\" y2=\"" << ly
        << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << margin_left + plot_w + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dppgd
