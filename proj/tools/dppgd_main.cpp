// Command-line front end: run experiments, parameter sweeps, baseline
// comparisons, spectral diagnostics, and convergence-rate fits.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dppgd/dppgd.hpp"

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const std::string& cli_dir,
                            const dppgd::ExperimentConfig& cfg) {
  if (!cli_dir.empty()) return cli_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return dppgd::default_output_dir();
}

void print_summary(const dppgd::ExperimentConfig& cfg,
                   const dppgd::ExperimentResult& result) {
  const dppgd::ExperimentSetup& setup = result.setup;
  const dppgd::MetricsTrace& trace = result.mean_trace;
  const std::size_t last = trace.size() - 1;
  std::printf("%s: %s, N=%d, n=%d, T=%ld, R=%d\n", cfg.name.c_str(),
              cfg.algorithm.c_str(), setup.problem.n_agents,
              setup.problem.dimension, cfg.rounds, cfg.repetitions);
  std::printf("  epsilon = %.6g (epsilon_bar = %.6g)%s\n",
              setup.weights.epsilon, setup.spectra.epsilon_bar,
              setup.epsilon_warning.empty() ? "" : "  [!]");
  if (!setup.epsilon_warning.empty())
    std::printf("  warning: %s\n", setup.epsilon_warning.c_str());
  std::printf("  gamma_fitted = %.6g, Gamma_fitted = %.6g (R^2 = %.4f)\n",
              setup.spectra.gamma_fitted, setup.spectra.Gamma_fitted,
              setup.spectra.fit_r_squared);
  std::printf("  f_star = %.12g (%s)\n", setup.reference.f_star,
              setup.reference.exact ? "analytic" : "iterative");
  std::printf("  terminal: gap_hat = %.6g, gap_bar = %.6g, consensus = %.6g, "
              "surplus = %.6g\n",
              trace.gap_hat[last], trace.gap_bar[last], trace.consensus[last],
              trace.surplus[last]);
}

void write_and_report(const dppgd::ExperimentConfig& cfg,
                      const dppgd::ExperimentResult& result,
                      const std::string& dir) {
  const dppgd::WrittenOutputs written =
      dppgd::write_experiment_outputs(cfg, result, dir);
  print_summary(cfg, result);
  std::printf("  wrote %s\n", written.csv_path.c_str());
  std::printf("  wrote %s\n", written.sidecar_path.c_str());
  for (const std::string& p : written.per_rep_paths)
    std::printf("  wrote %s\n", p.c_str());
}

dppgd::ChartSeries gap_series(const std::string& label,
                              const dppgd::MetricsTrace& trace) {
  dppgd::ChartSeries s;
  s.label = label;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.rounds[i] < 1) continue;  // log axis
    s.x.push_back(static_cast<double>(trace.rounds[i]));
    s.y.push_back(trace.gap_hat[i]);
  }
  return s;
}

dppgd::DirectedGraph graph_from_name(const std::string& name, int agents,
                                     double edge_prob, std::uint64_t seed) {
  if (name == "fig1") return dppgd::fig1_graph();
  if (name == "cycle") return dppgd::cycle_graph(agents);
  if (name == "complete") return dppgd::complete_graph(agents);
  if (name == "random") {
    dppgd::RngStream rng(dppgd::derive_seed(seed, dppgd::kGraphSeedTag));
    return dppgd::random_strongly_connected(agents, edge_prob, rng);
  }
  if (name.rfind("file:", 0) == 0) return dppgd::load_edge_list(name.substr(5));
  // bare path fallback
  if (fs::exists(name)) return dppgd::load_edge_list(name);
  throw dppgd::ConfigError("unknown graph '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dppgd: gradient-free distributed optimization over directed graphs"};
  app.require_subcommand(1);

  // ---- run ----
  std::string run_config_path, run_out_dir;
  CLI::App* cmd_run = app.add_subcommand(
      "run", "Run one experiment from a config file and write CSV + sidecar");
  cmd_run->add_option("config", run_config_path, "config file (key = value)")
      ->required();
  cmd_run->add_option("--out", run_out_dir,
                      "output directory (default: config, then $DPPGD_OUT_DIR, "
                      "then ./runs)");

  // ---- sweeps ----
  std::string sweep_config_path, sweep_out_dir;
  CLI::App* cmd_sweep_a = app.add_subcommand(
      "sweep-stepsize",
      "Run the step-size exponent sweep a in {0, 0.2, 0.5, 0.7, 1}");
  cmd_sweep_a->add_option("config", sweep_config_path, "base config file")
      ->required();
  cmd_sweep_a->add_option("--out", sweep_out_dir, "output directory");

  std::string beta_config_path, beta_out_dir;
  CLI::App* cmd_sweep_b = app.add_subcommand(
      "sweep-beta",
      "Run the smoothing-ratio sweep b in {1, 3, 5, 7, 9}");
  cmd_sweep_b->add_option("config", beta_config_path, "base config file")
      ->required();
  cmd_sweep_b->add_option("--out", beta_out_dir, "output directory");

  // ---- compare-baselines ----
  std::string cmp_config_path, cmp_out_dir;
  CLI::App* cmd_cmp = app.add_subcommand(
      "compare-baselines",
      "Run the gradient-free method against the distributed subgradient "
      "baseline on the same seeds");
  cmd_cmp->add_option("config", cmp_config_path, "base config file")
      ->required();
  cmd_cmp->add_option("--out", cmp_out_dir, "output directory");

  // ---- spectra ----
  std::string spectra_graph, spectra_rule = "uniform", spectra_grid;
  std::string spectra_policy = "practical";
  double spectra_epsilon = 0.0;
  int spectra_agents = 10;
  double spectra_edge_prob = 0.3;
  std::uint64_t spectra_seed = 1;
  CLI::App* cmd_spectra = app.add_subcommand(
      "spectra", "Spectral diagnostics of the augmented weight matrix");
  cmd_spectra
      ->add_option("graph", spectra_graph,
                   "fig1 | cycle | complete | random | file:<path>")
      ->required();
  cmd_spectra->add_option("--agents", spectra_agents,
                          "node count for generated graphs");
  cmd_spectra->add_option("--rule", spectra_rule, "uniform | lazy");
  cmd_spectra->add_option("--policy", spectra_policy,
                          "theory | practical | manual");
  cmd_spectra->add_option("--epsilon", spectra_epsilon,
                          "epsilon for --policy manual");
  cmd_spectra->add_option("--eps-grid", spectra_grid,
                          "lo:hi:n — tabulate diagnostics over a log grid");
  cmd_spectra->add_option("--edge-prob", spectra_edge_prob,
                          "edge probability for random graphs");
  cmd_spectra->add_option("--graph-seed", spectra_seed,
                          "seed for random graphs");

  // ---- fit-rate ----
  std::string fit_csv, fit_model = "sqrt", fit_column = "gap_hat";
  long fit_window = 0;
  CLI::App* cmd_fit = app.add_subcommand(
      "fit-rate", "Fit an empirical convergence rate to a run's CSV");
  cmd_fit->add_option("csv", fit_csv, "trace CSV produced by `run`")
      ->required();
  cmd_fit->add_option("--model", fit_model,
                      "sqrt (pure power law) | lnt (power law with log "
                      "correction)");
  cmd_fit->add_option("--window", fit_window,
                      "tail samples to fit (default: half the rows)");
  cmd_fit->add_option("--column", fit_column, "gap_hat | gap_bar");

  // ---- gen-graph ----
  std::string gen_kind, gen_out;
  int gen_agents = 10;
  double gen_edge_prob = 0.3;
  std::uint64_t gen_seed = 1;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen-graph", "Generate a strongly connected digraph edge list");
  cmd_gen->add_option("kind", gen_kind, "fig1 | cycle | complete | random")
      ->required();
  cmd_gen->add_option("--agents", gen_agents, "node count");
  cmd_gen->add_option("--edge-prob", gen_edge_prob,
                      "edge probability for random graphs");
  cmd_gen->add_option("--seed", gen_seed, "seed for random graphs");
  cmd_gen->add_option("--out", gen_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      const dppgd::ExperimentConfig cfg = dppgd::load_config(run_config_path);
      const dppgd::ExperimentResult result = dppgd::run_experiment(cfg);
      write_and_report(cfg, result, resolve_out_dir(run_out_dir, cfg));
    } else if (*cmd_sweep_a || *cmd_sweep_b) {
      const bool stepsize = static_cast<bool>(*cmd_sweep_a);
      const std::string& config_path =
          stepsize ? sweep_config_path : beta_config_path;
      const dppgd::ExperimentConfig base = dppgd::load_config(config_path);
      const std::string dir = resolve_out_dir(
          stepsize ? sweep_out_dir : beta_out_dir, base);
      const std::vector<dppgd::SweepEntry> entries =
          stepsize ? dppgd::sweep_stepsize(base) : dppgd::sweep_beta(base);
      std::vector<dppgd::ChartSeries> series;
      for (const dppgd::SweepEntry& entry : entries) {
        write_and_report(entry.config, entry.result, dir);
        series.push_back(gap_series(entry.label, entry.result.mean_trace));
      }
      const std::string svg_path =
          (fs::path(dir) / (base.name + (stepsize ? "_sweep_stepsize.svg"
                                                  : "_sweep_beta.svg")))
              .string();
      dppgd::write_file(
          svg_path, dppgd::render_svg_chart(
                        series,
                        stepsize ? "step-size exponent sweep"
                                 : "smoothing-ratio sweep",
                        "round", "gap_hat"));
      std::printf("wrote %s\n", svg_path.c_str());
    } else if (*cmd_cmp) {
      const dppgd::ExperimentConfig base = dppgd::load_config(cmp_config_path);
      const std::string dir = resolve_out_dir(cmp_out_dir, base);
      const dppgd::BaselineComparison cmp = dppgd::compare_baselines(base);
      write_and_report(cmp.gradient_free.config, cmp.gradient_free.result, dir);
      write_and_report(cmp.subgradient.config, cmp.subgradient.result, dir);
      const dppgd::MetricsTrace& free_trace = cmp.gradient_free.result.mean_trace;
      const dppgd::MetricsTrace& sub_trace = cmp.subgradient.result.mean_trace;
      const double free_gap = free_trace.gap_hat.back();
      const double sub_gap = sub_trace.gap_hat.back();
      std::printf("terminal gap_hat: gradient-free = %.6g, subgradient = %.6g "
                  "(first-order %s)\n",
                  free_gap, sub_gap,
                  sub_gap < free_gap ? "ahead, as expected" : "behind");
      const std::string svg_path =
          (fs::path(dir) / (base.name + "_compare.svg")).string();
      dppgd::write_file(
          svg_path,
          dppgd::render_svg_chart({gap_series("gradient-free", free_trace),
                                   gap_series("subgradient", sub_trace)},
                                  "baseline comparison", "round", "gap_hat"));
      std::printf("wrote %s\n", svg_path.c_str());
    } else if (*cmd_spectra) {
      const dppgd::DirectedGraph graph = graph_from_name(
          spectra_graph, spectra_agents, spectra_edge_prob, spectra_seed);
      const dppgd::WeightRule rule =
          spectra_rule == "lazy" ? dppgd::WeightRule::lazy
                                 : dppgd::WeightRule::uniform;
      const dppgd::WeightMatrices base = dppgd::build_weights(graph, rule);
      const dppgd::SpectralReport at_zero =
          dppgd::spectral_analysis(dppgd::augment(base, 0.0));
      std::printf("graph: %s, N = %d, rule = %s\n", spectra_graph.c_str(),
                  graph.node_count, spectra_rule.c_str());
      std::printf("|lambda2(0)| = %.12g, |lambda3(0)| = %.12g\n",
                  at_zero.lambda2_mag_at_zero, at_zero.lambda3_mag_at_zero);
      std::printf("epsilon_bar = %.12g\n", at_zero.epsilon_bar);
      if (!spectra_grid.empty()) {
        double lo = 0, hi = 0;
        int count = 0;
        if (std::sscanf(spectra_grid.c_str(), "%lf:%lf:%d", &lo, &hi,
                        &count) != 3 ||
            !(lo > 0) || !(hi > lo) || count < 2)
          throw dppgd::ConfigError("--eps-grid expects lo:hi:n with lo > 0");
        std::printf("%14s %14s %14s %14s %14s %8s\n", "epsilon", "|l2(eps)|",
                    "gamma_bound", "gamma_fitted", "Gamma_fitted", "R^2");
        for (int i = 0; i < count; ++i) {
          const double eps = std::pow(
              10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i /
                                         (count - 1));
          const dppgd::SpectralReport r =
              dppgd::spectral_analysis(dppgd::augment(base, eps));
          std::printf("%14.6g %14.6g %14.6g %14.6g %14.6g %8.4f\n", eps,
                      r.lambda2_mag_at_eps, r.gamma_bound, r.gamma_fitted,
                      r.Gamma_fitted, r.fit_r_squared);
        }
      } else {
        dppgd::EpsilonPolicy policy;
        if (spectra_policy == "theory")
          policy = dppgd::EpsilonPolicy::theory();
        else if (spectra_policy == "practical")
          policy = dppgd::EpsilonPolicy::practical();
        else if (spectra_policy == "manual")
          policy = dppgd::EpsilonPolicy::manual(spectra_epsilon);
        else
          throw dppgd::ConfigError("unknown --policy '" + spectra_policy + "'");
        std::string warning;
        const double eps = dppgd::pick_epsilon(base, at_zero, policy, &warning);
        const dppgd::SpectralReport report =
            dppgd::spectral_analysis(dppgd::augment(base, eps));
        std::printf("epsilon (%s) = %.12g%s\n", spectra_policy.c_str(), eps,
                    report.epsilon_exceeds_bar ? "  [not provably admissible]"
                                               : "");
        if (!warning.empty()) std::printf("warning: %s\n", warning.c_str());
        std::printf("|lambda2(eps)| = %.12g\n", report.lambda2_mag_at_eps);
        std::printf("gamma_bound = %.12g\n", report.gamma_bound);
        std::printf("gamma_fitted = %.12g, Gamma_fitted = %.12g (R^2 = %.6f, "
                    "%d points)\n",
                    report.gamma_fitted, report.Gamma_fitted,
                    report.fit_r_squared, report.fit_points);
      }
    } else if (*cmd_fit) {
      const dppgd::MetricsTrace trace = dppgd::read_trace_csv(fit_csv);
      const std::vector<double>* column = nullptr;
      if (fit_column == "gap_hat")
        column = &trace.gap_hat;
      else if (fit_column == "gap_bar")
        column = &trace.gap_bar;
      else
        throw dppgd::ConfigError("unknown --column '" + fit_column + "'");
      const dppgd::RateModel model =
          fit_model == "lnt" ? dppgd::RateModel::lnt_over_sqrt
          : fit_model == "sqrt"
              ? dppgd::RateModel::one_over_sqrt
              : throw dppgd::ConfigError("unknown --model '" + fit_model + "'");
      const long window =
          fit_window > 0 ? fit_window
                         : std::max<long>(3, static_cast<long>(trace.size()) / 2);
      const dppgd::RateFit fit =
          dppgd::fit_rate(trace.rounds, *column, model, window);
      std::printf("model: %s, column: %s\n",
                  model == dppgd::RateModel::one_over_sqrt
                      ? "gap ~ C * k^e"
                      : "gap ~ C * k^e * (ln k)^u",
                  fit_column.c_str());
      std::printf("exponent e = %.6g\n", fit.exponent);
      if (model == dppgd::RateModel::lnt_over_sqrt)
        std::printf("ln coefficient u = %.6g\n", fit.ln_coeff);
      std::printf("R^2 = %.6f over %ld points (window %ld, dropped %ld)%s\n",
                  fit.r_squared, fit.used, fit.window, fit.dropped,
                  fit.reliable ? "" : "  [unreliable: most gaps non-positive]");
    } else if (*cmd_gen) {
      dppgd::DirectedGraph g;
      if (gen_kind == "fig1")
        g = dppgd::fig1_graph();
      else if (gen_kind == "cycle")
        g = dppgd::cycle_graph(gen_agents);
      else if (gen_kind == "complete")
        g = dppgd::complete_graph(gen_agents);
      else if (gen_kind == "random") {
        dppgd::RngStream rng(dppgd::derive_seed(gen_seed, dppgd::kGraphSeedTag));
        g = dppgd::random_strongly_connected(gen_agents, gen_edge_prob, rng);
      } else {
        throw dppgd::ConfigError("unknown graph kind '" + gen_kind + "'");
      }
      if (gen_out.empty())
        std::fputs(dppgd::format_edge_list(g).c_str(), stdout);
      else {
        dppgd::save_edge_list(g, gen_out);
        std::printf("wrote %s\n", gen_out.c_str());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
