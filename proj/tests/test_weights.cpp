#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "dppgd/graph.hpp"
#include "dppgd/weights.hpp"

using namespace dppgd;

namespace {
DirectedGraph two_node() { return DirectedGraph{2, {{0, 1}, {1, 0}}}; }
DirectedGraph three_cycle() { return DirectedGraph{3, {{0, 1}, {1, 2}, {2, 0}}}; }
}  // namespace

TEST_CASE("two-node uniform weights are all one half") {
  const WeightMatrices w = build_weights(two_node(), WeightRule::uniform);
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK((w.row_stochastic - half).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((w.col_stochastic - half).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("three-cycle uniform weights match hand enumeration") {
  const WeightMatrices w = build_weights(three_cycle(), WeightRule::uniform);
  // receive side: node i hears from itself and its ring predecessor
  Eigen::MatrixXd ar(3, 3);
  ar << 0.5, 0.0, 0.5,
        0.5, 0.5, 0.0,
        0.0, 0.5, 0.5;
  // send side: node j splits equally over itself and its ring successor
  Eigen::MatrixXd ac(3, 3);
  ac << 0.5, 0.0, 0.5,
        0.5, 0.5, 0.0,
        0.0, 0.5, 0.5;
  CHECK((w.row_stochastic - ar).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((w.col_stochastic - ac).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("lazy rule keeps half the mass on self") {
  const WeightMatrices w = build_weights(complete_graph(4), WeightRule::lazy);
  for (int i = 0; i < 4; ++i) {
    CHECK(w.row_stochastic(i, i) == Catch::Approx(0.5));
    for (int j = 0; j < 4; ++j)
      if (j != i) CHECK(w.row_stochastic(i, j) == Catch::Approx(1.0 / 6.0));
  }
}

TEST_CASE("single-node weights are the identity scalar") {
  const DirectedGraph g{1, {}};
  for (const auto rule : {WeightRule::uniform, WeightRule::lazy}) {
    const WeightMatrices w = build_weights(g, rule);
    CHECK(w.row_stochastic(0, 0) == 1.0);
    CHECK(w.col_stochastic(0, 0) == 1.0);
  }
}

TEST_CASE("stochasticity and sparsity hold on the benchmark graph") {
  const DirectedGraph g = fig1_graph();
  const WeightMatrices w = build_weights(g, WeightRule::uniform);
  CHECK(max_row_sum_deviation(w.row_stochastic) < 1e-12);
  CHECK(max_col_sum_deviation(w.col_stochastic) < 1e-12);
  CHECK(w.row_stochastic.minCoeff() >= 0.0);
  CHECK(w.col_stochastic.minCoeff() >= 0.0);
  // weights live exactly on the communication pattern
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const bool listens = (i == j) || g.has_edge(j, i);
      CHECK((w.row_stochastic(i, j) != 0.0) == listens);
      CHECK((w.col_stochastic(i, j) != 0.0) == listens);
    }
  }
  // the point of the construction: neither matrix is doubly stochastic here
  CHECK(max_col_sum_deviation(w.row_stochastic) > 0.01);
  CHECK(max_row_sum_deviation(w.col_stochastic) > 0.01);
}

TEST_CASE("weights require strong connectivity") {
  DirectedGraph path{3, {{0, 1}, {1, 2}}};
  CHECK_THROWS_AS(build_weights(path, WeightRule::uniform),
                  NotStronglyConnected);
}

TEST_CASE("augmented single-agent matrix matches the closed form") {
  const DirectedGraph g{1, {}};
  WeightMatrices w = build_weights(g, WeightRule::uniform);
  w = augment(w, 0.1);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, 0.1,
              0.0, 0.9;
  CHECK((w.augmented - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(w.epsilon == 0.1);
}

TEST_CASE("augmented matrix blocks and column sums") {
  const DirectedGraph g = fig1_graph();
  const WeightMatrices base = build_weights(g, WeightRule::uniform);
  for (const double eps : {0.0, 1e-4, 0.05}) {
    const WeightMatrices w = augment(base, eps);
    const int n = 10;
    REQUIRE(w.has_augmented());
    const Eigen::MatrixXd& a = w.augmented;
    REQUIRE(a.rows() == 2 * n);
    // block layout: [[Ar, eps I], [I - Ar, Ac - eps I]]
    CHECK((a.topLeftCorner(n, n) - base.row_stochastic).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((a.topRightCorner(n, n) -
           eps * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((a.bottomLeftCorner(n, n) -
           (Eigen::MatrixXd::Identity(n, n) - base.row_stochastic))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    CHECK((a.bottomRightCorner(n, n) -
           (base.col_stochastic - eps * Eigen::MatrixXd::Identity(n, n)))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    // the whole 2N x 2N matrix is column stochastic
    CHECK(max_col_sum_deviation(a) < 1e-12);
  }
  CHECK_THROWS_AS(augment(base, -0.01), Error);
}
