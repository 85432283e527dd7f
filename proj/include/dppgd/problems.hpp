#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dppgd/errors.hpp"
#include "dppgd/oracle.hpp"
#include "dppgd/rng.hpp"

namespace dppgd {

// A named multi-agent test problem: N private costs plus whatever is known
// about the global optimum.
struct Problem {
  std::string name;
  int dimension = 0;
  int n_agents = 0;
  std::vector<LocalCost> locals;
  std::optional<double> analytic_optimal_value;
  std::optional<Eigen::VectorXd> analytic_optimizer;
  std::vector<double> coefficients;  // per-agent parameters, for provenance

  double global(const Eigen::VectorXd& x) const {
    double sum = 0.0;
    for (const LocalCost& c : locals) sum += c.value(x);
    return sum;
  }
};

namespace detail {

// f_i(x) = l * |x_1 - 1| + sum_d (1 + x_{d+1} - 2 x_d)^2.
// Minimized (at 0) by the all-ones vector for any l >= 0.
inline LocalCost chained_kink_cost(int dimension, double l) {
  LocalCost cost;
  cost.dimension = dimension;
  cost.value = [l, dimension](const Eigen::VectorXd& x) {
    double v = l * std::abs(x[0] - 1.0);
    for (int d = 0; d + 1 < dimension; ++d) {
      const double t = 1.0 + x[d + 1] - 2.0 * x[d];
      v += t * t;
    }
    return v;
  };
  cost.subgradient = [l, dimension](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension);
    const double s = x[0] - 1.0;
    if (s > 0.0)
      g[0] = l;
    else if (s < 0.0)
      g[0] = -l;  // 0 at the kink itself is a valid subgradient
    for (int d = 0; d + 1 < dimension; ++d) {
      const double t = 1.0 + x[d + 1] - 2.0 * x[d];
      g[d] += -4.0 * t;
      g[d + 1] += 2.0 * t;
    }
    return g;
  };
  return cost;
}

}  // namespace detail

constexpr std::uint64_t kProblemSeedTag = 77;

// Problem registry.  "nesterov_nonsmooth": agent i holds
// f_i(x) = l_i |x_1 - 1| + sum_d (1 + x_{d+1} - 2 x_d)^2 with l_i drawn
// uniformly from [l_min, l_max]; the global optimum is the all-ones vector
// with value 0.
inline Problem make_problem(const std::string& name, int dimension,
                            int n_agents, std::uint64_t seed,
                            double l_min = 0.5, double l_max = 1.5) {
  if (dimension < 1) throw ConfigError("make_problem: need dimension >= 1");
  if (n_agents < 1) throw ConfigError("make_problem: need n_agents >= 1");
  if (name == "nesterov_nonsmooth") {
    if (!(l_min <= l_max) || !(l_min >= 0.0))
      throw ConfigError("make_problem: need 0 <= l_min <= l_max");
    Problem p;
    p.name = name;
    p.dimension = dimension;
    p.n_agents = n_agents;
    RngStream rng(derive_seed(seed, kProblemSeedTag));
    for (int i = 0; i < n_agents; ++i) {
      const double l = rng.uniform(l_min, l_max);
      p.coefficients.push_back(l);
      p.locals.push_back(detail::chained_kink_cost(dimension, l));
    }
    p.analytic_optimal_value = 0.0;
    p.analytic_optimizer = Eigen::VectorXd::Ones(dimension);
    return p;
  }
  throw ConfigError("make_problem: unknown problem '" + name + "'");
}

}  // namespace dppgd
