#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dppgd/errors.hpp"
#include "dppgd/rng.hpp"

namespace dppgd {

// One agent's private convex cost.  Only zeroth-order access is required by
// the algorithm; the subgradient, when present, serves baselines and the
// reference solver.
struct LocalCost {
  int dimension = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> subgradient;  // optional
  std::optional<double> lipschitz_bound;  // metadata only

  bool has_subgradient() const { return static_cast<bool>(subgradient); }
};

// Smoothing radii beta1_k (outer perturbation) and beta2_k (finite-difference
// offset), plus their ratio beta_tilde_k = beta2_k / beta1_k which controls
// the estimator's bias.  Both sequences must be positive and non-increasing;
// the factories guarantee that.
struct SmoothingSchedule {
  std::function<double(long)> beta1;
  std::function<double(long)> beta2;

  double beta_tilde(long k) const { return beta2(k) / beta1(k); }

  // beta1 = (1+k)^-p1, beta2 = (1+k)^-p2.
  static SmoothingSchedule power(double p1, double p2) {
    if (!(p1 >= 0.0) || !(p2 >= 0.0))
      throw Error("SmoothingSchedule: exponents must be >= 0");
    SmoothingSchedule s;
    s.beta1 = [p1](long k) {
      return std::pow(1.0 + static_cast<double>(k), -p1);
    };
    s.beta2 = [p2](long k) {
      return std::pow(1.0 + static_cast<double>(k), -p2);
    };
    return s;
  }

  // beta1 = (1+k)^-p1 with the ratio pinned to beta_tilde_k = (1+k)^-b,
  // i.e. beta2 = (1+k)^-(p1+b).
  static SmoothingSchedule power_ratio(double p1, double b) {
    if (!(p1 >= 0.0) || !(b >= 0.0))
      throw Error("SmoothingSchedule: exponents must be >= 0");
    return power(p1, p1 + b);
  }
};

enum class SamplerMode { gaussian, ball_both, ball_mixed };

// Draws the two perturbation directions (xi1, xi2) for one agent.  gaussian:
// both standard normal.  ball_both: both uniform on the solid l2-ball of
// radius sqrt(n+2).  ball_mixed: xi1 on radius sqrt(n+2), xi2 on radius
// sqrt(n).  A ball of radius r has direction second moment (r^2/(n+2)) * I,
// so xi1 always satisfies E[xi1 xi1'] = I, like the gaussian.
class DirectionSampler {
 public:
  DirectionSampler(SamplerMode mode, int dimension, std::uint64_t seed)
      : mode_(mode), dimension_(dimension), rng_(seed) {
    if (dimension < 1) throw Error("DirectionSampler: need dimension >= 1");
  }

  SamplerMode mode() const { return mode_; }
  int dimension() const { return dimension_; }

  // Draws xi1 then xi2, in that order, so replaying a stream from the same
  // seed reproduces a run draw-for-draw.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> draw() {
    Eigen::VectorXd xi1 = draw_perturbation();
    Eigen::VectorXd xi2;
    switch (mode_) {
      case SamplerMode::gaussian:
        xi2 = rng_.normal_vector(dimension_);
        break;
      case SamplerMode::ball_both:
        xi2 = rng_.uniform_ball(dimension_, std::sqrt(dimension_ + 2.0));
        break;
      case SamplerMode::ball_mixed:
        xi2 = rng_.uniform_ball(dimension_, std::sqrt(double(dimension_)));
        break;
    }
    return {std::move(xi1), std::move(xi2)};
  }

  // Draws only xi1 (used when estimating the smoothed cost itself).
  Eigen::VectorXd draw_perturbation() {
    switch (mode_) {
      case SamplerMode::gaussian:
        return rng_.normal_vector(dimension_);
      case SamplerMode::ball_both:
      case SamplerMode::ball_mixed:
        return rng_.uniform_ball(dimension_, std::sqrt(dimension_ + 2.0));
    }
    throw Error("DirectionSampler: unknown mode");
  }

 private:
  SamplerMode mode_;
  int dimension_;
  RngStream rng_;
};

// Two-point pseudo-gradient
//   g = (f(x + b1*xi1 + b2*xi2) - f(x + b1*xi1)) / b2 * xi2
// using exactly two cost evaluations.  Non-finite cost values surface as
// NonFiniteCost carrying the offending point.
inline Eigen::VectorXd pseudo_gradient(const LocalCost& cost,
                                       const Eigen::VectorXd& x, long k,
                                       const SmoothingSchedule& smoothing,
                                       DirectionSampler& sampler) {
  if (x.size() != cost.dimension)
    throw DimensionMismatch("pseudo_gradient: point dimension mismatch");
  if (!x.allFinite()) throw Error("pseudo_gradient: x must be finite");
  const double b1 = smoothing.beta1(k);
  const double b2 = smoothing.beta2(k);
  if (!(b2 > 0.0)) throw Error("pseudo_gradient: beta2 must be positive");
  const auto [xi1, xi2] = sampler.draw();
  const Eigen::VectorXd base = x + b1 * xi1;
  const Eigen::VectorXd bumped = base + b2 * xi2;
  const double f_base = cost.value(base);
  if (!std::isfinite(f_base)) throw NonFiniteCost(base);
  const double f_bumped = cost.value(bumped);
  if (!std::isfinite(f_bumped)) throw NonFiniteCost(bumped);
  return ((f_bumped - f_base) / b2) * xi2;
}

// Monte-Carlo estimate of the smoothed cost E[f(x + beta1*xi1)].
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

inline McEstimate smoothed_value_mc(const LocalCost& cost,
                                    const Eigen::VectorXd& x, double beta1,
                                    DirectionSampler& sampler, long samples) {
  if (samples < 1) throw Error("smoothed_value_mc: need samples >= 1");
  if (x.size() != cost.dimension)
    throw DimensionMismatch("smoothed_value_mc: point dimension mismatch");
  double mean = 0.0, m2 = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double v = cost.value(x + beta1 * sampler.draw_perturbation());
    if (!std::isfinite(v)) throw NonFiniteCost(x);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  McEstimate est;
  est.mean = mean;
  est.samples = samples;
  est.std_error =
      samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) /
                              static_cast<double>(samples))
                  : 0.0;
  return est;
}

// Empirical first and second moments of the pseudo-gradient norm at a fixed
// point and round.  The empirical moments always satisfy
// mean_norm <= sqrt(mean_square_norm) (Cauchy-Schwarz), mirroring the
// moment-ordering property of the estimator.
struct MomentReport {
  double mean_norm = 0.0;
  double mean_square_norm = 0.0;
  long samples = 0;
  bool jensen_holds = false;
};

inline MomentReport oracle_moment_check(const LocalCost& cost,
                                        const Eigen::VectorXd& x, long k,
                                        const SmoothingSchedule& smoothing,
                                        DirectionSampler& sampler,
                                        long samples) {
  if (samples < 1) throw Error("oracle_moment_check: need samples >= 1");
  double sum_norm = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double norm = pseudo_gradient(cost, x, k, smoothing, sampler).norm();
    sum_norm += norm;
    sum_sq += norm * norm;
  }
  MomentReport report;
  report.samples = samples;
  report.mean_norm = sum_norm / static_cast<double>(samples);
  report.mean_square_norm = sum_sq / static_cast<double>(samples);
  report.jensen_holds =
      report.mean_norm <=
      std::sqrt(report.mean_square_norm) + 1e-12 * (1.0 + report.mean_norm);
  return report;
}

// Per-agent bundle: each agent owns a private direction stream derived from
// (seed, agent index), so results do not depend on agent evaluation order
// and are reproducible from the master seed alone.
class PseudoGradientOracle {
 public:
  static constexpr std::uint64_t kSamplerTagBase = 1000;

  PseudoGradientOracle(std::vector<LocalCost> costs, SamplerMode mode,
                       SmoothingSchedule smoothing, std::uint64_t seed)
      : costs_(std::move(costs)), smoothing_(std::move(smoothing)) {
    if (costs_.empty()) throw Error("PseudoGradientOracle: no costs");
    samplers_.reserve(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i)
      samplers_.emplace_back(mode, costs_[i].dimension,
                             derive_seed(seed, kSamplerTagBase + i));
  }

  int n_agents() const { return static_cast<int>(costs_.size()); }
  const std::vector<LocalCost>& costs() const { return costs_; }
  const SmoothingSchedule& smoothing() const { return smoothing_; }

  Eigen::VectorXd gradient(int agent, const Eigen::VectorXd& x, long k) {
    return pseudo_gradient(costs_.at(agent), x, k, smoothing_,
                           samplers_.at(agent));
  }

 private:
  std::vector<LocalCost> costs_;
  SmoothingSchedule smoothing_;
  std::vector<DirectionSampler> samplers_;
};

}  // namespace dppgd
