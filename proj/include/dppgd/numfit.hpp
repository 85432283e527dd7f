#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dppgd/errors.hpp"

namespace dppgd {

// Ordinary least squares, shared by the matrix-power decay fit and the
// empirical convergence-rate fit.

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

namespace detail {

inline double r_squared_from_residuals(const std::vector<double>& y,
                                       const std::vector<double>& fitted) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  }
  if (ss_tot <= 1e-30) return ss_res <= 1e-30 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace detail

inline LinearFit fit_line(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_line: size mismatch");
  const auto n = x.size();
  if (n < 2) throw Error("fit_line: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw Error("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = (dn * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / dn;
  f.points = static_cast<int>(n);
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) fitted[i] = f.intercept + f.slope * x[i];
  f.r_squared = detail::r_squared_from_residuals(y, fitted);
  return f;
}

// y ~ c0 + c1*x1 + c2*x2 via 3x3 normal equations.
struct PlaneFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

inline PlaneFit fit_plane(const std::vector<double>& x1,
                          const std::vector<double>& x2,
                          const std::vector<double>& y) {
  if (x1.size() != y.size() || x2.size() != y.size())
    throw DimensionMismatch("fit_plane: size mismatch");
  const auto n = x1.size();
  if (n < 3) throw Error("fit_plane: need at least 3 points");
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d row(1.0, x1[i], x2[i]);
    ata += row * row.transpose();
    atb += row * y[i];
  }
  const Eigen::Vector3d c = ata.fullPivLu().solve(atb);
  PlaneFit f;
  f.c0 = c[0];
  f.c1 = c[1];
  f.c2 = c[2];
  f.points = static_cast<int>(n);
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i)
    fitted[i] = f.c0 + f.c1 * x1[i] + f.c2 * x2[i];
  f.r_squared = detail::r_squared_from_residuals(y, fitted);
  return f;
}

}  // namespace dppgd
