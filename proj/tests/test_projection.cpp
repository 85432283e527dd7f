#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "dppgd/projection.hpp"
#include "dppgd/rng.hpp"

using namespace dppgd;

namespace {
Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("whole space projection is the identity") {
  const ConstraintSet s = ConstraintSet::whole_space(3);
  Eigen::VectorXd v(3);
  v << 1e9, -2.5, 0.0;
  CHECK(project(s, v) == v);
  CHECK(s.contains(v));
}

TEST_CASE("box projection clamps per coordinate") {
  const ConstraintSet s = ConstraintSet::uniform_box(2, -1.0, 1.0);
  CHECK(project(s, vec2(0.3, -0.7)) == vec2(0.3, -0.7));
  CHECK(project(s, vec2(3.0, -5.0)) == vec2(1.0, -1.0));
  CHECK(project(s, vec2(0.0, 9.0)) == vec2(0.0, 1.0));
  CHECK_FALSE(s.contains(vec2(1.5, 0.0)));
  CHECK(s.contains(vec2(1.0, -1.0)));
}

TEST_CASE("ball projection scales radially") {
  const ConstraintSet s = ConstraintSet::ball(vec2(0.0, 0.0), 1.0);
  const Eigen::VectorXd p = project(s, vec2(3.0, 4.0));
  CHECK(p(0) == Catch::Approx(0.6).margin(1e-15));
  CHECK(p(1) == Catch::Approx(0.8).margin(1e-15));
  CHECK(project(s, vec2(0.1, 0.2)) == vec2(0.1, 0.2));

  const ConstraintSet shifted = ConstraintSet::ball(vec2(1.0, 1.0), 2.0);
  const Eigen::VectorXd q = project(shifted, vec2(1.0, 5.0));
  CHECK(q(0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(q(1) == Catch::Approx(3.0).margin(1e-15));
}

TEST_CASE("half-space projection moves along the normal") {
  // x . a <= b with a = (1, 0), b = 1
  const ConstraintSet s = ConstraintSet::halfspace(vec2(1.0, 0.0), 1.0);
  CHECK(project(s, vec2(0.5, 7.0)) == vec2(0.5, 7.0));
  const Eigen::VectorXd p = project(s, vec2(2.0, 2.0));
  CHECK(p(0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(p(1) == Catch::Approx(2.0).margin(1e-15));

  // oblique normal: v = (2, 0), a = (1, 1), b = 0 lands on (1, -1)
  const ConstraintSet o = ConstraintSet::halfspace(vec2(1.0, 1.0), 0.0);
  const Eigen::VectorXd q = project(o, vec2(2.0, 0.0));
  CHECK(q(0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(q(1) == Catch::Approx(-1.0).margin(1e-14));
  CHECK(q.dot(vec2(1.0, 1.0)) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("projection properties over random sets and points") {
  RngStream rng(31);
  const int dim = 4;
  std::vector<ConstraintSet> sets;
  sets.push_back(ConstraintSet::whole_space(dim));
  sets.push_back(ConstraintSet::uniform_box(dim, -0.8, 1.3));
  sets.push_back(ConstraintSet::ball(Eigen::VectorXd::Ones(dim), 1.7));
  Eigen::VectorXd normal(dim);
  normal << 1.0, -2.0, 0.5, 0.0;
  sets.push_back(ConstraintSet::halfspace(normal, 0.3));

  for (const auto& s : sets) {
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd u = 5.0 * rng.normal_vector(dim);
      const Eigen::VectorXd v = 5.0 * rng.normal_vector(dim);
      const Eigen::VectorXd pu = project(s, u);
      const Eigen::VectorXd pv = project(s, v);
      // result is feasible
      CHECK(s.contains(pu, 1e-9));
      // idempotent
      CHECK((project(s, pu) - pu).norm() < 1e-12);
      // non-expansive
      CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
      // optimality: moving toward any other feasible point never helps
      // ||u - pu|| <= ||u - w|| for feasible w
      const Eigen::VectorXd w = project(s, rng.normal_vector(dim));
      CHECK((u - pu).norm() <= (u - w).norm() + 1e-12);
    }
  }
}

TEST_CASE("constraint factories validate their inputs") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << -1.0, 1.0;
  CHECK_THROWS_AS(ConstraintSet::box(lo, hi), Error);
  CHECK_THROWS_AS(ConstraintSet::ball(vec2(0, 0), -1.0), Error);
  CHECK_THROWS_AS(ConstraintSet::halfspace(vec2(0, 0), 1.0), Error);
  CHECK_THROWS_AS(ConstraintSet::whole_space(0), Error);

  const ConstraintSet s = ConstraintSet::uniform_box(2, -1, 1);
  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(project(s, wrong), DimensionMismatch);
}
