#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dppgd/errors.hpp"
#include "dppgd/oracle.hpp"
#include "dppgd/projection.hpp"
#include "dppgd/rng.hpp"
#include "dppgd/schedule.hpp"
#include "dppgd/weights.hpp"

namespace dppgd {

// Per-agent state: decision value x, surplus y, and the step-size-weighted
// running average x_hat that carries the convergence guarantee.
struct AgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd x_hat;
};

struct NetworkState {
  long round = 0;
  double alpha_sum = 0.0;  // sum of alpha_0..alpha_round
  std::vector<AgentState> agents;
  Eigen::VectorXd z_hat;   // weighted running average of z_bar

  int n_agents() const { return static_cast<int>(agents.size()); }
  int dimension() const {
    return agents.empty() ? 0 : static_cast<int>(agents[0].x.size());
  }

  // Network average of x + y; conserved by the mixing part of the update.
  Eigen::VectorXd z_bar() const {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dimension());
    for (const AgentState& a : agents) sum += a.x + a.y;
    return sum / static_cast<double>(n_agents());
  }
};

enum class X0Policy { zeros, random_in_set, given };

struct InitOptions {
  X0Policy policy = X0Policy::zeros;
  Eigen::VectorXd given;   // shared by all agents when policy == given
  std::uint64_t seed = 0;  // for random_in_set
};

namespace detail {

inline Eigen::VectorXd random_point_in_set(const ConstraintSet& set,
                                           RngStream& rng) {
  switch (set.kind) {
    case ConstraintSet::Kind::box: {
      Eigen::VectorXd x(set.dimension);
      for (int d = 0; d < set.dimension; ++d)
        x[d] = rng.uniform(set.lower[d], set.upper[d]);
      return x;
    }
    case ConstraintSet::Kind::ball:
      return set.center + rng.uniform_ball(set.dimension, set.radius);
    case ConstraintSet::Kind::whole_space:
    case ConstraintSet::Kind::halfspace: {
      // no natural uniform measure; draw from [-1, 1]^n and project
      Eigen::VectorXd x(set.dimension);
      for (int d = 0; d < set.dimension; ++d) x[d] = rng.uniform(-1.0, 1.0);
      return project(set, x);
    }
  }
  throw Error("random_point_in_set: unknown set kind");
}

}  // namespace detail

// Initial state: y = 0, x_hat = x, alpha_sum = alpha_0, z_hat = z_bar.
inline NetworkState init(int n_agents, int dimension, const ConstraintSet& set,
                         const StepSchedule& steps, const InitOptions& opts) {
  if (n_agents < 1) throw Error("init: need at least one agent");
  if (dimension < 1) throw Error("init: need dimension >= 1");
  if (set.dimension != dimension)
    throw DimensionMismatch("init: constraint set dimension mismatch");
  NetworkState state;
  state.round = 0;
  state.alpha_sum = steps.alpha(0);
  state.agents.resize(n_agents);
  RngStream rng(opts.seed);
  for (int i = 0; i < n_agents; ++i) {
    Eigen::VectorXd x0;
    switch (opts.policy) {
      case X0Policy::zeros:
        x0 = Eigen::VectorXd::Zero(dimension);
        if (!set.contains(x0, 1e-12))
          throw Error("init: zero vector lies outside the constraint set");
        break;
      case X0Policy::random_in_set:
        x0 = detail::random_point_in_set(set, rng);
        break;
      case X0Policy::given:
        if (opts.given.size() != dimension)
          throw DimensionMismatch("init: given x0 has wrong dimension");
        if (!set.contains(opts.given, 1e-12))
          throw Error("init: given x0 lies outside the constraint set");
        x0 = opts.given;
        break;
    }
    state.agents[i].x = x0;
    state.agents[i].y = Eigen::VectorXd::Zero(dimension);
    state.agents[i].x_hat = x0;
  }
  state.z_hat = state.z_bar();
  return state;
}

struct StepResult {
  NetworkState state;
  // Per-agent descent directions used this round (pseudo-gradients, or
  // subgradients when driven by the baseline), one row per agent.
  Eigen::MatrixXd descent_directions;
  // g-terms of the stacked single-matrix form: row i holds
  // x_{k+1}^i - sum_j [A_r]_ij x_k^j - eps * y_k^i.
  Eigen::MatrixXd augmented_g;
  // G_k: sum over agents of ||augmented_g row||.
  double aggregated_g_norm = 0.0;
};

// One synchronous round with caller-supplied descent directions:
//   x_{k+1}^i = P_X[ sum_j [A_r]_ij x_k^j + eps y_k^i - alpha_k d^i ]
//   y_{k+1}^i = x_k^i - sum_j [A_r]_ij x_k^j + sum_j [A_c]_ij y_k^j - eps y_k^i
//   x_hat and z_hat advance by the step-size-weighted averaging recursion.
// Throws DivergenceError when any coordinate leaves [-guard, guard] or goes
// non-finite.
inline StepResult step_with_directions(const NetworkState& s,
                                       const WeightMatrices& w,
                                       const Eigen::MatrixXd& directions,
                                       const StepSchedule& steps,
                                       const ConstraintSet& set,
                                       double divergence_guard = 1e9) {
  const int n_agents = s.n_agents();
  const int dim = s.dimension();
  if (n_agents == 0) throw Error("step: empty state");
  if (w.n_agents() != n_agents)
    throw DimensionMismatch("step: weight matrices sized for different N");
  if (directions.rows() != n_agents || directions.cols() != dim)
    throw DimensionMismatch("step: descent direction shape mismatch");
  if (!(w.epsilon >= 0.0)) throw Error("step: epsilon must be >= 0");
  const double eps = w.epsilon;

  Eigen::MatrixXd x(n_agents, dim), y(n_agents, dim);
  for (int i = 0; i < n_agents; ++i) {
    x.row(i) = s.agents[i].x.transpose();
    y.row(i) = s.agents[i].y.transpose();
  }
  const Eigen::MatrixXd mixed_x = w.row_stochastic * x;
  const Eigen::MatrixXd routed_y = w.col_stochastic * y;
  const double alpha_k = steps.alpha(s.round);

  StepResult result;
  result.descent_directions = directions;
  result.augmented_g.resize(n_agents, dim);
  result.state.round = s.round + 1;
  result.state.agents.resize(n_agents);

  const double alpha_next = steps.alpha(s.round + 1);
  const double new_alpha_sum = s.alpha_sum + alpha_next;
  // zero-step runs keep x_hat frozen instead of dividing 0/0
  const double avg_weight =
      new_alpha_sum > 0.0 ? alpha_next / new_alpha_sum : 0.0;
  result.state.alpha_sum = new_alpha_sum;

  double g_norm_total = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    const Eigen::VectorXd consensus =
        mixed_x.row(i).transpose() + eps * s.agents[i].y;
    const Eigen::VectorXd x_next =
        project(set, consensus - alpha_k * directions.row(i).transpose());
    const Eigen::VectorXd g_term = x_next - consensus;
    const Eigen::VectorXd y_next = s.agents[i].x -
                                   mixed_x.row(i).transpose() +
                                   routed_y.row(i).transpose() -
                                   eps * s.agents[i].y;
    result.augmented_g.row(i) = g_term.transpose();
    g_norm_total += g_term.norm();

    AgentState& next = result.state.agents[i];
    next.x = x_next;
    next.y = y_next;
    next.x_hat = s.agents[i].x_hat + avg_weight * (x_next - s.agents[i].x_hat);

    const double extreme =
        std::max({next.x.cwiseAbs().maxCoeff(), next.y.cwiseAbs().maxCoeff(),
                  next.x_hat.cwiseAbs().maxCoeff()});
    if (!next.x.allFinite() || !next.y.allFinite() ||
        !next.x_hat.allFinite() || extreme > divergence_guard)
      throw DivergenceError(s.round);
  }
  result.aggregated_g_norm = g_norm_total;
  result.state.z_hat =
      s.z_hat + avg_weight * (result.state.z_bar() - s.z_hat);
  return result;
}

// One round of the gradient-free method: draws each agent's two-point
// pseudo-gradient at its current x, then advances the network.
inline StepResult step(const NetworkState& s, const WeightMatrices& w,
                       PseudoGradientOracle& oracle, const StepSchedule& steps,
                       const ConstraintSet& set,
                       double divergence_guard = 1e9) {
  const int n_agents = s.n_agents();
  const int dim = s.dimension();
  if (oracle.n_agents() != n_agents)
    throw DimensionMismatch("step: oracle sized for different N");
  Eigen::MatrixXd directions(n_agents, dim);
  for (int i = 0; i < n_agents; ++i)
    directions.row(i) = oracle.gradient(i, s.agents[i].x, s.round).transpose();
  return step_with_directions(s, w, directions, steps, set, divergence_guard);
}

// ---- stacked single-matrix mirror -------------------------------------
// The same round can be written z_{k+1} = A(eps) z_k + [g; 0] with
// z = [x; y] stacked over agents.  Used as an independent cross-check of
// the per-agent implementation.

inline Eigen::MatrixXd stack_state(const NetworkState& s) {
  const int n_agents = s.n_agents();
  const int dim = s.dimension();
  Eigen::MatrixXd z(2 * n_agents, dim);
  for (int i = 0; i < n_agents; ++i) {
    z.row(i) = s.agents[i].x.transpose();
    z.row(n_agents + i) = s.agents[i].y.transpose();
  }
  return z;
}

inline Eigen::MatrixXd step_stacked(const Eigen::MatrixXd& z,
                                    const WeightMatrices& w,
                                    const Eigen::MatrixXd& g_terms) {
  if (!w.has_augmented()) throw Error("step_stacked: call augment() first");
  const int n_agents = w.n_agents();
  if (z.rows() != 2 * n_agents)
    throw DimensionMismatch("step_stacked: stacked state has wrong height");
  if (g_terms.rows() != n_agents || g_terms.cols() != z.cols())
    throw DimensionMismatch("step_stacked: g-term shape mismatch");
  Eigen::MatrixXd next = w.augmented * z;
  next.topRows(n_agents) += g_terms;
  return next;
}

// Max abs deviation between the per-agent step result and the stacked
// mirror applied to the same before-state and g-terms.
inline double stacked_deviation(const NetworkState& before,
                                const StepResult& result,
                                const WeightMatrices& w) {
  const int n_agents = before.n_agents();
  const Eigen::MatrixXd mirrored =
      step_stacked(stack_state(before), w, result.augmented_g);
  double dev = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    dev = std::max(
        dev, (mirrored.row(i).transpose() - result.state.agents[i].x)
                 .cwiseAbs()
                 .maxCoeff());
    dev = std::max(
        dev,
        (mirrored.row(n_agents + i).transpose() - result.state.agents[i].y)
            .cwiseAbs()
            .maxCoeff());
  }
  return dev;
}

}  // namespace dppgd
