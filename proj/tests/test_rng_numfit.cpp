#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dppgd/numfit.hpp"
#include "dppgd/rng.hpp"

using namespace dppgd;

TEST_CASE("uniform01 stays in (0, 1] and is deterministic per seed") {
  RngStream a(123), b(123), c(124);
  bool all_match = true, any_differ = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    all_match = all_match && (u == b.uniform01());
    any_differ = any_differ || (u != c.uniform01());
  }
  CHECK(all_match);
  CHECK(any_differ);
}

TEST_CASE("normal draws have standard moments") {
  RngStream rng(7);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);       // SE ~ 0.0022
  CHECK(std::abs(var - 1.0) < 0.02);  // SE ~ 0.0032
}

TEST_CASE("uniform_ball stays inside and has the exact direction covariance") {
  RngStream rng(11);
  const int n = 3;
  const double radius = std::sqrt(n + 2.0);
  const int samples = 200000;
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  int inside_half = 0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd v = rng.uniform_ball(n, radius);
    REQUIRE(v.norm() <= radius + 1e-12);
    second += v * v.transpose();
    if (v.norm() <= radius / 2) ++inside_half;
  }
  second /= samples;
  // E[xi xi'] = (r^2 / (n+2)) I = I for r = sqrt(n+2)
  CHECK((second - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
        0.02);
  // uniform volume: P(||v|| <= r/2) = 2^-n
  CHECK(std::abs(inside_half / double(samples) - std::pow(0.5, n)) < 0.005);
}

TEST_CASE("derive_seed separates streams") {
  const auto s1 = derive_seed(42, 0);
  const auto s2 = derive_seed(42, 1);
  const auto s3 = derive_seed(43, 0);
  CHECK(s1 != s2);
  CHECK(s1 != s3);
  CHECK(s1 == derive_seed(42, 0));  // stable
}

TEST_CASE("fit_line recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 2.0 * i);
  }
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == Catch::Approx(-2.0).margin(1e-12));
  CHECK(f.intercept == Catch::Approx(3.0).margin(1e-12));
  CHECK(f.r_squared == Catch::Approx(1.0).margin(1e-12));
  CHECK(f.points == 20);
}

TEST_CASE("fit_line validates input") {
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), Error);
  CHECK_THROWS_AS(fit_line({1.0, 2.0}, {1.0}), DimensionMismatch);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {1.0, 2.0}), Error);  // degenerate x
}

TEST_CASE("fit_line r_squared drops with noise") {
  RngStream rng(5);
  std::vector<double> x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 10.0 * rng.normal());
  }
  const LinearFit f = fit_line(x, y);
  CHECK(f.r_squared < 1.0);
  CHECK(f.r_squared > 0.8);
  CHECK(f.slope == Catch::Approx(2.0).margin(0.2));
}

TEST_CASE("fit_plane recovers exact coefficients") {
  std::vector<double> x1, x2, y;
  RngStream rng(9);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(0.0, 5.0);
    const double b = rng.uniform(-2.0, 2.0);
    x1.push_back(a);
    x2.push_back(b);
    y.push_back(1.0 + 2.0 * a - 0.5 * b);
  }
  const PlaneFit f = fit_plane(x1, x2, y);
  CHECK(f.c0 == Catch::Approx(1.0).margin(1e-10));
  CHECK(f.c1 == Catch::Approx(2.0).margin(1e-10));
  CHECK(f.c2 == Catch::Approx(-0.5).margin(1e-10));
  CHECK(f.r_squared == Catch::Approx(1.0).margin(1e-10));
}
