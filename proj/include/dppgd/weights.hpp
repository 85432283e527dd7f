#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dppgd/errors.hpp"
#include "dppgd/graph.hpp"

namespace dppgd {

enum class WeightRule { uniform, lazy };

// Consensus weights for a strongly connected digraph.  row_stochastic mixes
// decision values over in-neighbors; col_stochastic routes surplus along
// out-edges.  Neither needs to be doubly stochastic; the augmented matrix
// (see augment) restores an exact averaging limit instead.
struct WeightMatrices {
  Eigen::MatrixXd row_stochastic;  // A_r: rows sum to 1
  Eigen::MatrixXd col_stochastic;  // A_c: columns sum to 1
  double epsilon = 0.0;
  Eigen::MatrixXd augmented;       // 2N x 2N; empty until augment() is called

  int n_agents() const { return static_cast<int>(row_stochastic.rows()); }
  bool has_augmented() const { return augmented.size() > 0; }
};

inline double max_row_sum_deviation(const Eigen::MatrixXd& m) {
  return (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

inline double max_col_sum_deviation(const Eigen::MatrixXd& m) {
  return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

// Builds A_r and A_c from the graph.  uniform: equal weight over the
// (self-inclusive) neighborhood.  lazy: weight 1/2 on self, the remainder
// split uniformly over the other neighbors (all weight on self if there are
// none).  Entries outside the neighborhood sparsity pattern stay exactly 0.
inline WeightMatrices build_weights(const DirectedGraph& g,
                                    WeightRule rule = WeightRule::uniform) {
  if (!is_strongly_connected(g)) throw NotStronglyConnected();
  const int n = g.node_count;
  WeightMatrices w;
  w.row_stochastic = Eigen::MatrixXd::Zero(n, n);
  w.col_stochastic = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> in = g.in_neighbors(i);
    if (rule == WeightRule::uniform) {
      const double weight = 1.0 / static_cast<double>(in.size());
      for (int j : in) w.row_stochastic(i, j) = weight;
    } else {
      if (in.size() == 1) {
        w.row_stochastic(i, i) = 1.0;
      } else {
        w.row_stochastic(i, i) = 0.5;
        const double weight = 0.5 / static_cast<double>(in.size() - 1);
        for (int j : in)
          if (j != i) w.row_stochastic(i, j) = weight;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const std::vector<int> out = g.out_neighbors(j);
    if (rule == WeightRule::uniform) {
      const double weight = 1.0 / static_cast<double>(out.size());
      for (int i : out) w.col_stochastic(i, j) = weight;
    } else {
      if (out.size() == 1) {
        w.col_stochastic(j, j) = 1.0;
      } else {
        w.col_stochastic(j, j) = 0.5;
        const double weight = 0.5 / static_cast<double>(out.size() - 1);
        for (int i : out)
          if (i != j) w.col_stochastic(i, j) = weight;
      }
    }
  }
  return w;
}

// Assembles the 2N x 2N augmented matrix
//   [ A_r          eps * I      ]
//   [ I - A_r      A_c - eps*I  ]
// which is column-stochastic by construction.  eps = 0 is allowed for
// spectral analysis; the algorithm itself needs eps > 0.
inline WeightMatrices augment(WeightMatrices w, double eps) {
  if (!(eps >= 0.0)) throw Error("augment: epsilon must be >= 0");
  const int n = w.n_agents();
  if (n == 0) throw Error("augment: empty weight matrices");
  if (w.col_stochastic.rows() != n || w.col_stochastic.cols() != n ||
      w.row_stochastic.cols() != n)
    throw DimensionMismatch("augment: weight matrix shapes disagree");
  w.epsilon = eps;
  w.augmented.resize(2 * n, 2 * n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  w.augmented.topLeftCorner(n, n) = w.row_stochastic;
  w.augmented.topRightCorner(n, n) = eps * id;
  w.augmented.bottomLeftCorner(n, n) = id - w.row_stochastic;
  w.augmented.bottomRightCorner(n, n) = w.col_stochastic - eps * id;
  return w;
}

}  // namespace dppgd
