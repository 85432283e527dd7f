#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dppgd/core.hpp"
#include "dppgd/errors.hpp"
#include "dppgd/problems.hpp"
#include "dppgd/projection.hpp"
#include "dppgd/schedule.hpp"

namespace dppgd {

// First-order counterpart of the gradient-free round: identical network
// update, but each agent descends along its exact subgradient instead of a
// two-point pseudo-gradient.
inline StepResult distributed_subgradient_step(
    const NetworkState& s, const WeightMatrices& w,
    const std::vector<LocalCost>& costs, const StepSchedule& steps,
    const ConstraintSet& set, double divergence_guard = 1e9) {
  const int n_agents = s.n_agents();
  const int dim = s.dimension();
  if (static_cast<int>(costs.size()) != n_agents)
    throw DimensionMismatch("distributed_subgradient_step: cost count");
  Eigen::MatrixXd directions(n_agents, dim);
  for (int i = 0; i < n_agents; ++i) {
    if (!costs[i].has_subgradient())
      throw Error(
          "distributed_subgradient_step: agent cost lacks a subgradient");
    directions.row(i) = costs[i].subgradient(s.agents[i].x).transpose();
  }
  return step_with_directions(s, w, directions, steps, set, divergence_guard);
}

// Ground truth for gap metrics.
struct ReferenceSolution {
  double f_star = 0.0;
  Eigen::VectorXd x_star;
  bool exact = false;      // true when taken from the analytic registry
  bool converged = false;  // iterative run met the stall criterion
  long iterations = 0;
};

// Reference optimum: the analytic registry value when the problem has one
// and its optimizer is feasible, otherwise a long-horizon centralized
// projected subgradient run with diminishing steps that stops once the
// running best improves by less than tol over stall_window iterations.
inline ReferenceSolution solve_reference(const Problem& p,
                                         const ConstraintSet& set,
                                         double tol = 1e-9,
                                         long max_iterations = 2000000,
                                         long stall_window = 10000) {
  if (set.dimension != p.dimension)
    throw DimensionMismatch("solve_reference: set dimension mismatch");
  ReferenceSolution ref;
  if (p.analytic_optimal_value && p.analytic_optimizer &&
      set.contains(*p.analytic_optimizer, 1e-12)) {
    ref.f_star = *p.analytic_optimal_value;
    ref.x_star = *p.analytic_optimizer;
    ref.exact = true;
    ref.converged = true;
    return ref;
  }
  for (const LocalCost& c : p.locals)
    if (!c.has_subgradient())
      throw Error("solve_reference: problem costs lack subgradients");

  Eigen::VectorXd x = project(set, Eigen::VectorXd::Zero(p.dimension));
  auto global_subgradient = [&p](const Eigen::VectorXd& at) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dimension);
    for (const LocalCost& c : p.locals) g += c.subgradient(at);
    return g;
  };
  // scale the step to the subgradient magnitude at the start
  const double h0 = global_subgradient(x).norm();
  const double step0 = 1.0 / std::max(1.0, h0);

  double best_f = p.global(x);
  Eigen::VectorXd best_x = x;
  long last_improvement = 0;
  long t = 0;
  for (; t < max_iterations; ++t) {
    if (t - last_improvement >= stall_window) break;
    const Eigen::VectorXd h = global_subgradient(x);
    const double alpha = step0 / std::sqrt(static_cast<double>(t + 1));
    x = project(set, x - alpha * h);
    const double f = p.global(x);
    if (f < best_f - tol) {
      best_f = f;
      best_x = x;
      last_improvement = t;
    }
  }
  ref.f_star = best_f;
  ref.x_star = best_x;
  ref.exact = false;
  ref.converged = t < max_iterations;
  ref.iterations = t;
  return ref;
}

}  // namespace dppgd
