#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dppgd/errors.hpp"
#include "dppgd/numfit.hpp"
#include "dppgd/weights.hpp"

namespace dppgd {

// Eigenvalue magnitudes of a general (non-symmetric) matrix, sorted
// descending.  Dense solve; intended for modest sizes (2N up to a few
// hundred).
inline std::vector<double> eigenvalue_magnitudes(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("eigenvalue_magnitudes: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw EigenSolverFailure("eigenvalue decomposition did not converge");
  std::vector<double> mags(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    mags[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  return mags;
}

// Threshold below which the augmented matrix is guaranteed to have exactly
// one unit eigenvalue: ((1 - |lambda3|) / (20 + 8N))^N, where lambda3 is the
// third-largest-magnitude eigenvalue of the eps = 0 augmented matrix.
inline double epsilon_bar(int n_agents, double lambda3_mag) {
  if (n_agents < 1) throw Error("epsilon_bar: need at least one agent");
  return std::pow((1.0 - lambda3_mag) / (20.0 + 8.0 * n_agents), n_agents);
}

// Limit of the augmented matrix powers for admissible eps:
//   [ ones*ones'/N   ones*ones'/N ]
//   [ 0              0            ]
inline Eigen::MatrixXd averaging_limit(int n_agents) {
  const int n = n_agents;
  Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  limit.topLeftCorner(n, n).setConstant(1.0 / n);
  limit.topRightCorner(n, n).setConstant(1.0 / n);
  return limit;
}

inline double inf_norm(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

struct DecayFit {
  double rate = 0.0;       // fitted geometric factor per power
  double prefactor = 0.0;  // fitted constant
  double r_squared = 0.0;
  int points = 0;
  bool diverged = false;   // norms grew past the guard instead of decaying
};

// Fits ||A^k - L||_inf ~ prefactor * rate^k over k = 1..k_max, using only
// powers whose norm lies in [floor, ceiling]: below the floor further powers
// sit in rounding noise, and a finite ceiling skips the early transient.
// Stops early past the divergence guard.
inline DecayFit fit_power_decay(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& limit, int k_max = 200,
    double floor = 1e-13,
    double ceiling = std::numeric_limits<double>::infinity(),
    double divergence_guard = 1e9) {
  if (a.rows() != a.cols() || a.rows() != limit.rows() ||
      a.cols() != limit.cols())
    throw DimensionMismatch("fit_power_decay: shape mismatch");
  std::vector<double> ks, lognorms;
  Eigen::MatrixXd power = a;
  DecayFit fit;
  for (int k = 1; k <= k_max; ++k) {
    const double norm = inf_norm(power - limit);
    if (!std::isfinite(norm) || norm > divergence_guard) {
      fit.diverged = true;
      break;
    }
    if (norm < floor) break;
    if (norm <= ceiling) {
      ks.push_back(static_cast<double>(k));
      lognorms.push_back(std::log(norm));
    }
    if (k < k_max) power = power * a;
  }
  fit.points = static_cast<int>(ks.size());
  if (fit.points < 2) return fit;  // rate stays 0; caller checks points
  const LinearFit line = fit_line(ks, lognorms);
  fit.rate = std::exp(line.slope);
  fit.prefactor = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  return fit;
}

struct SpectralReport {
  int n_agents = 0;
  double epsilon = 0.0;
  // eps = 0 diagnostics: the augmented matrix has a double unit eigenvalue,
  // so lambda2_mag_at_zero should be 1 and lambda3 drives the admissible
  // range of eps.
  double lambda2_mag_at_zero = 0.0;
  double lambda3_mag_at_zero = 0.0;
  double epsilon_bar = 0.0;
  // diagnostics at the actual eps
  double lambda2_mag_at_eps = 0.0;
  double gamma_bound = 0.0;   // max{|l3| + (20+8N) eps^(1/N), |l2(eps)|}
  double gamma_fitted = 0.0;  // empirical decay factor of ||A^k - L||_inf
  double Gamma_fitted = 0.0;  // empirical prefactor
  double fit_r_squared = 0.0;
  int fit_points = 0;
  bool fit_diverged = false;
  bool epsilon_exceeds_bar = false;  // warning, not an error
};

// Full spectral diagnostics for an augmented weight matrix.  For a single
// agent the eps = 0 matrix is 2x2 and has no third eigenvalue; lambda3 is
// taken as 0 there.
inline SpectralReport spectral_analysis(const WeightMatrices& w,
                                        int fit_k_max = 200,
                                        double fit_floor = 1e-13) {
  if (!w.has_augmented())
    throw Error("spectral_analysis: call augment() first");
  const int n = w.n_agents();
  SpectralReport report;
  report.n_agents = n;
  report.epsilon = w.epsilon;

  const WeightMatrices at_zero = augment(w, 0.0);
  const std::vector<double> mags0 = eigenvalue_magnitudes(at_zero.augmented);
  report.lambda2_mag_at_zero = mags0.size() > 1 ? mags0[1] : 0.0;
  report.lambda3_mag_at_zero = mags0.size() > 2 ? mags0[2] : 0.0;
  report.epsilon_bar = epsilon_bar(n, report.lambda3_mag_at_zero);

  const std::vector<double> mags = eigenvalue_magnitudes(w.augmented);
  report.lambda2_mag_at_eps = mags.size() > 1 ? mags[1] : 0.0;
  report.gamma_bound =
      std::max(report.lambda3_mag_at_zero +
                   (20.0 + 8.0 * n) * std::pow(w.epsilon, 1.0 / n),
               report.lambda2_mag_at_eps);

  const DecayFit fit =
      fit_power_decay(w.augmented, averaging_limit(n), fit_k_max, fit_floor);
  report.gamma_fitted = fit.rate;
  report.Gamma_fitted = fit.prefactor;
  report.fit_r_squared = fit.r_squared;
  report.fit_points = fit.points;
  report.fit_diverged = fit.diverged;
  report.epsilon_exceeds_bar = w.epsilon >= report.epsilon_bar;
  return report;
}

// How to choose the surplus gain eps.
struct EpsilonPolicy {
  enum class Kind { theory, practical, manual };
  Kind kind = Kind::practical;
  double manual_value = 0.0;
  // grid for the practical search
  double grid_lo = 1e-5;
  double grid_hi = 1.0;
  int grid_points = 25;
  int fit_k_max = 200;

  static EpsilonPolicy theory() { return {Kind::theory, 0.0}; }
  static EpsilonPolicy practical() { return {Kind::practical, 0.0}; }
  static EpsilonPolicy manual(double value) {
    return {Kind::manual, value};
  }
};

// Picks eps per policy.  theory: epsilon_bar / 2 (provably admissible but
// tiny, so mixing is slow).  practical: argmin of the fitted decay factor
// over a log-spaced grid.  manual: caller's value, with a warning string
// when it is not provably admissible.  The library never prints; warnings
// come back through *warning.
inline double pick_epsilon(const WeightMatrices& base,
                           const SpectralReport& report,
                           const EpsilonPolicy& policy,
                           std::string* warning = nullptr) {
  if (warning) warning->clear();
  switch (policy.kind) {
    case EpsilonPolicy::Kind::theory:
      return report.epsilon_bar / 2.0;
    case EpsilonPolicy::Kind::manual: {
      if (!(policy.manual_value > 0.0))
        throw Error("pick_epsilon: manual epsilon must be positive");
      if (policy.manual_value >= report.epsilon_bar && warning)
        *warning = "epsilon " + std::to_string(policy.manual_value) +
                   " is not provably admissible (epsilon_bar = " +
                   std::to_string(report.epsilon_bar) + ")";
      return policy.manual_value;
    }
    case EpsilonPolicy::Kind::practical: {
      if (policy.grid_points < 2 || !(policy.grid_lo > 0.0) ||
          !(policy.grid_hi > policy.grid_lo))
        throw Error("pick_epsilon: malformed practical grid");
      const Eigen::MatrixXd limit = averaging_limit(base.n_agents());
      const double log_lo = std::log10(policy.grid_lo);
      const double log_hi = std::log10(policy.grid_hi);
      double best_eps = -1.0;
      double best_rate = 0.0;
      for (int i = 0; i < policy.grid_points; ++i) {
        const double eps = std::pow(
            10.0, log_lo + (log_hi - log_lo) * i / (policy.grid_points - 1));
        const WeightMatrices cand = augment(base, eps);
        const DecayFit fit =
            fit_power_decay(cand.augmented, limit, policy.fit_k_max);
        if (fit.diverged || fit.points < 5 || !(fit.rate < 1.0)) continue;
        if (best_eps < 0.0 || fit.rate < best_rate) {
          best_eps = eps;
          best_rate = fit.rate;
        }
      }
      if (best_eps < 0.0) {
        if (warning)
          *warning =
              "practical grid search found no contracting epsilon; "
              "falling back to epsilon_bar / 2";
        return report.epsilon_bar / 2.0;
      }
      // exceeding the provable threshold is the point of this mode; the
      // report's epsilon_exceeds_bar flag records it without a warning
      return best_eps;
    }
  }
  throw Error("pick_epsilon: unknown policy");
}

}  // namespace dppgd
