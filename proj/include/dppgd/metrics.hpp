#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dppgd/core.hpp"
#include "dppgd/errors.hpp"
#include "dppgd/numfit.hpp"
#include "dppgd/problems.hpp"

namespace dppgd {

// Column-oriented trace of a run.  All vectors share the same length; row r
// describes the state after rounds[r] rounds.  aggregated_g on row r is the
// G-value of the step that produced that state (0 on the initial row).
struct MetricsTrace {
  std::vector<long> rounds;
  std::vector<double> alpha;
  std::vector<double> beta1;
  std::vector<double> beta_tilde;
  std::vector<double> gap_hat;       // mean_i f(x_hat^i) - f*
  std::vector<double> gap_bar;       // f(z_bar) - f*
  std::vector<double> consensus;     // max_i ||x^i - z_bar||
  std::vector<double> surplus;       // max_i ||y^i||
  std::vector<double> aggregated_g;  // G of the incoming step
  // per_agent_gap[i][r] = f(x_hat^i) - f* at row r; empty unless enabled
  std::vector<std::vector<double>> per_agent_gap;

  std::size_t size() const { return rounds.size(); }
};

inline double consensus_error(const NetworkState& s) {
  const Eigen::VectorXd mean = s.z_bar();
  double worst = 0.0;
  for (const AgentState& a : s.agents)
    worst = std::max(worst, (a.x - mean).norm());
  return worst;
}

inline double surplus_norm(const NetworkState& s) {
  double worst = 0.0;
  for (const AgentState& a : s.agents) worst = std::max(worst, a.y.norm());
  return worst;
}

// mean over agents of f(x_hat^i) - f_star
inline double mean_running_gap(const NetworkState& s, const Problem& p,
                               double f_star) {
  double sum = 0.0;
  for (const AgentState& a : s.agents) sum += p.global(a.x_hat) - f_star;
  return sum / static_cast<double>(s.n_agents());
}

// ---- empirical convergence-rate fit ------------------------------------

enum class RateModel {
  one_over_sqrt,  // log gap ~ c + e log k          (pure power law)
  lnt_over_sqrt   // log gap ~ c + e log k + u log log k
};

struct RateFit {
  RateModel model = RateModel::one_over_sqrt;
  double exponent = 0.0;   // e; -0.5 for a 1/sqrt(k) decay
  double ln_coeff = 0.0;   // u; only for lnt_over_sqrt
  double intercept = 0.0;
  double r_squared = 0.0;
  long window = 0;         // tail samples requested
  long used = 0;           // samples that entered the fit
  long dropped = 0;        // non-positive gaps discarded from the window
  bool reliable = false;   // false when most of the window was dropped
};

// Fits the tail of a gap trace in log-log space.  The window is the number
// of trailing samples considered (rounds < 2 are excluded up front since
// log log k needs k >= 2); non-positive gaps inside the window are dropped,
// and the fit is flagged unreliable when more than half drop out.
inline RateFit fit_rate(const std::vector<long>& rounds,
                        const std::vector<double>& gap, RateModel model,
                        long window) {
  if (rounds.size() != gap.size())
    throw DimensionMismatch("fit_rate: column length mismatch");
  if (window < 3) throw Error("fit_rate: window must be >= 3");

  std::vector<std::size_t> eligible;
  for (std::size_t r = 0; r < rounds.size(); ++r)
    if (rounds[r] >= 2) eligible.push_back(r);
  if (eligible.size() > static_cast<std::size_t>(window))
    eligible.erase(eligible.begin(),
                   eligible.end() - static_cast<std::ptrdiff_t>(window));

  RateFit fit;
  fit.model = model;
  fit.window = static_cast<long>(eligible.size());
  std::vector<double> log_k, log_log_k, log_gap;
  for (std::size_t r : eligible) {
    if (!(gap[r] > 0.0)) {
      ++fit.dropped;
      continue;
    }
    const double lk = std::log(static_cast<double>(rounds[r]));
    log_k.push_back(lk);
    log_log_k.push_back(std::log(lk));
    log_gap.push_back(std::log(gap[r]));
  }
  fit.used = static_cast<long>(log_k.size());
  if (fit.used < 3) {
    fit.reliable = false;
    return fit;
  }
  if (model == RateModel::one_over_sqrt) {
    const LinearFit line = fit_line(log_k, log_gap);
    fit.exponent = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
  } else {
    const PlaneFit plane = fit_plane(log_k, log_log_k, log_gap);
    fit.exponent = plane.c1;
    fit.ln_coeff = plane.c2;
    fit.intercept = plane.c0;
    fit.r_squared = plane.r_squared;
  }
  fit.reliable = fit.dropped * 2 <= fit.window;
  return fit;
}

}  // namespace dppgd
