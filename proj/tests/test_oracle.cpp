#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "dppgd/oracle.hpp"
#include "dppgd/rng.hpp"

using namespace dppgd;

namespace {
LocalCost abs_cost() {
  LocalCost c;
  c.dimension = 1;
  c.value = [](const Eigen::VectorXd& x) { return std::abs(x(0) - 1.0); };
  return c;
}

LocalCost sq_norm_cost(int n) {
  LocalCost c;
  c.dimension = n;
  c.value = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  return c;
}
}  // namespace

TEST_CASE("smoothing schedules follow their power laws") {
  const SmoothingSchedule s = SmoothingSchedule::power(1.5, 2.5);
  CHECK(s.beta1(0) == Catch::Approx(1.0));
  CHECK(s.beta2(0) == Catch::Approx(1.0));
  CHECK(s.beta1(1) == Catch::Approx(std::pow(2.0, -1.5)));
  CHECK(s.beta2(3) == Catch::Approx(std::pow(4.0, -2.5)));
  // the ratio decays like (1+k)^-(p2-p1)
  CHECK(s.beta_tilde(9) == Catch::Approx(0.1).epsilon(1e-12));

  const SmoothingSchedule r = SmoothingSchedule::power_ratio(1.5, 1.0);
  for (const long k : {0L, 1L, 7L, 100L}) {
    CHECK(r.beta1(k) == Catch::Approx(s.beta1(k)).epsilon(1e-15));
    CHECK(r.beta2(k) == Catch::Approx(s.beta2(k)).epsilon(1e-15));
  }
  // positive and non-increasing
  double prev = 10.0;
  for (long k = 0; k < 50; ++k) {
    CHECK(s.beta1(k) > 0.0);
    CHECK(s.beta1(k) <= prev);
    prev = s.beta1(k);
  }
}

TEST_CASE("direction sampler is deterministic and mode-consistent") {
  const int n = 3;
  DirectionSampler a(SamplerMode::gaussian, n, 55);
  DirectionSampler b(SamplerMode::gaussian, n, 55);
  for (int i = 0; i < 20; ++i) {
    const auto [a1, a2] = a.draw();
    const auto [b1, b2] = b.draw();
    CHECK(a1 == b1);
    CHECK(a2 == b2);
    CHECK(a1.size() == n);
  }

  DirectionSampler both(SamplerMode::ball_both, n, 56);
  DirectionSampler mixed(SamplerMode::ball_mixed, n, 57);
  for (int i = 0; i < 200; ++i) {
    const auto [x1, x2] = both.draw();
    CHECK(x1.norm() <= std::sqrt(n + 2.0) + 1e-12);
    CHECK(x2.norm() <= std::sqrt(n + 2.0) + 1e-12);
    const auto [m1, m2] = mixed.draw();
    CHECK(m1.norm() <= std::sqrt(n + 2.0) + 1e-12);
    CHECK(m2.norm() <= std::sqrt(double(n)) + 1e-12);
  }
}

TEST_CASE("sampler second moments") {
  const int n = 2;
  const int samples = 150000;
  for (const auto mode :
       {SamplerMode::gaussian, SamplerMode::ball_both, SamplerMode::ball_mixed}) {
    DirectionSampler s(mode, n, 58);
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < samples; ++i) {
      const auto [x1, x2] = s.draw();
      m1 += x1 * x1.transpose();
      m2 += x2 * x2.transpose();
    }
    m1 /= samples;
    m2 /= samples;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    // the first direction is always isotropic with unit second moment
    CHECK((m1 - id).cwiseAbs().maxCoeff() < 0.03);
    // the second direction shrinks to (n/(n+2)) I in mixed mode
    const double scale =
        mode == SamplerMode::ball_mixed ? n / (n + 2.0) : 1.0;
    CHECK((m2 - scale * id).cwiseAbs().maxCoeff() < 0.03);
  }
}

TEST_CASE("pseudo-gradient of a linear cost is exact") {
  const int n = 3;
  Eigen::VectorXd c(n);
  c << 2.0, -1.0, 0.5;
  LocalCost cost;
  cost.dimension = n;
  cost.value = [c](const Eigen::VectorXd& x) { return c.dot(x) + 4.0; };

  const SmoothingSchedule sched = SmoothingSchedule::power(1.5, 2.5);
  DirectionSampler sampler(SamplerMode::gaussian, n, 60);
  DirectionSampler twin(SamplerMode::gaussian, n, 60);

  Eigen::VectorXd x(n);
  x << 0.3, -0.7, 2.0;
  for (long k = 0; k < 10; ++k) {
    const auto [xi1, xi2] = twin.draw();
    const Eigen::VectorXd expected = c.dot(xi2) * xi2;
    const Eigen::VectorXd g = pseudo_gradient(cost, x, k, sched, sampler);
    // the finite difference of a linear map cancels everything but c . xi2
    CHECK((g - expected).norm() < 1e-8 * (1.0 + expected.norm()));
  }
}

TEST_CASE("pseudo-gradient uses exactly two cost evaluations") {
  int evals = 0;
  LocalCost cost;
  cost.dimension = 2;
  cost.value = [&evals](const Eigen::VectorXd& x) {
    ++evals;
    return x.squaredNorm();
  };
  DirectionSampler sampler(SamplerMode::gaussian, 2, 61);
  const SmoothingSchedule sched = SmoothingSchedule::power(1.5, 2.5);
  pseudo_gradient(cost, Eigen::VectorXd::Zero(2), 0, sched, sampler);
  CHECK(evals == 2);
  pseudo_gradient(cost, Eigen::VectorXd::Zero(2), 5, sched, sampler);
  CHECK(evals == 4);
}

TEST_CASE("pseudo-gradient is unbiased for a quadratic") {
  const int n = 2;
  const LocalCost cost = sq_norm_cost(n);
  SmoothingSchedule sched;
  sched.beta1 = [](long) { return 1e-3; };
  sched.beta2 = [](long) { return 1e-3; };
  DirectionSampler sampler(SamplerMode::gaussian, n, 62);

  Eigen::VectorXd x(n);
  x << 1.0, 1.0;
  const int m = 30000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mean_sq = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd g = pseudo_gradient(cost, x, 0, sched, sampler);
    mean += g;
    mean_sq += g.cwiseProduct(g);
  }
  mean /= m;
  mean_sq /= m;
  for (int d = 0; d < n; ++d) {
    const double se =
        std::sqrt((mean_sq(d) - mean(d) * mean(d)) / (m - 1.0));
    CHECK(std::abs(mean(d) - 2.0 * x(d)) < 4.0 * se);
  }
}

TEST_CASE("smoothed value estimate brackets a kinked cost") {
  const LocalCost cost = abs_cost();
  Eigen::VectorXd x(1);
  x << 1.0;  // at the kink, where smoothing bias is largest
  const double beta1 = 0.5;
  DirectionSampler sampler(SamplerMode::gaussian, 1, 63);
  const McEstimate est = smoothed_value_mc(cost, x, beta1, sampler, 100000);
  const double f = cost.value(x);
  // f <= smoothed <= f + beta1 * sqrt(3) for a 1-Lipschitz cost
  CHECK(est.mean >= f - 3.0 * est.std_error);
  CHECK(est.mean <= f + beta1 * std::sqrt(3.0) + 3.0 * est.std_error);
  // here the smoothed value is E|0.5 xi| = 0.5 sqrt(2/pi), a known constant
  CHECK(est.mean ==
        Catch::Approx(0.5 * std::sqrt(2.0 / M_PI)).margin(4.0 * est.std_error));

  LocalCost constant;
  constant.dimension = 1;
  constant.value = [](const Eigen::VectorXd&) { return 3.25; };
  const McEstimate flat = smoothed_value_mc(constant, x, 0.1, sampler, 1000);
  CHECK(flat.mean == Catch::Approx(3.25).margin(1e-12));
  CHECK(flat.std_error == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("moment report stays finite and satisfies Jensen") {
  const SmoothingSchedule sched = SmoothingSchedule::power(1.5, 2.5);
  for (const auto mode :
       {SamplerMode::gaussian, SamplerMode::ball_both, SamplerMode::ball_mixed}) {
    DirectionSampler sampler(mode, 1, 64);
    Eigen::VectorXd x(1);
    x << 0.4;
    for (const long k : {0L, 10L, 1000L}) {
      const MomentReport r =
          oracle_moment_check(abs_cost(), x, k, sched, sampler, 2000);
      CHECK(std::isfinite(r.mean_norm));
      CHECK(std::isfinite(r.mean_square_norm));
      CHECK(r.mean_square_norm >= 0.0);
      CHECK(r.jensen_holds);
    }
  }
}

TEST_CASE("non-finite costs are reported with the offending point") {
  LocalCost cost;
  cost.dimension = 2;
  cost.value = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  DirectionSampler sampler(SamplerMode::gaussian, 2, 65);
  const SmoothingSchedule sched = SmoothingSchedule::power(1.5, 2.5);
  try {
    pseudo_gradient(cost, Eigen::VectorXd::Zero(2), 0, sched, sampler);
    FAIL("expected NonFiniteCost");
  } catch (const NonFiniteCost& e) {
    CHECK(e.point().size() == 2);
    CHECK(e.point().allFinite());
  }
}

TEST_CASE("pseudo-gradient validates its inputs") {
  DirectionSampler sampler(SamplerMode::gaussian, 2, 66);
  const SmoothingSchedule good = SmoothingSchedule::power(1.5, 2.5);

  SmoothingSchedule zero2 = good;
  zero2.beta2 = [](long) { return 0.0; };
  CHECK_THROWS_AS(
      pseudo_gradient(sq_norm_cost(2), Eigen::VectorXd::Zero(2), 0, zero2,
                      sampler),
      Error);

  CHECK_THROWS_AS(
      pseudo_gradient(sq_norm_cost(2), Eigen::VectorXd::Zero(3), 0, good,
                      sampler),
      DimensionMismatch);

  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(pseudo_gradient(sq_norm_cost(2), bad, 0, good, sampler),
                  Error);
}

TEST_CASE("per-agent oracle streams are reproducible and distinct") {
  const int n = 2;
  std::vector<LocalCost> costs{sq_norm_cost(n), sq_norm_cost(n)};
  const SmoothingSchedule sched = SmoothingSchedule::power(1.5, 2.5);
  PseudoGradientOracle a(costs, SamplerMode::gaussian, sched, 70);
  PseudoGradientOracle b(costs, SamplerMode::gaussian, sched, 70);
  PseudoGradientOracle c(costs, SamplerMode::gaussian, sched, 71);

  const Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  bool identical = true, agents_differ = false, seeds_differ = false;
  for (long k = 0; k < 10; ++k) {
    const Eigen::VectorXd ga = a.gradient(0, x, k);
    identical = identical && (ga == b.gradient(0, x, k));
    agents_differ = agents_differ || (ga != b.gradient(1, x, k));
    seeds_differ = seeds_differ || (ga != c.gradient(0, x, k));
  }
  CHECK(identical);
  CHECK(agents_differ);
  CHECK(seeds_differ);
}
