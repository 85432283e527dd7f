#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "dppgd/errors.hpp"

namespace dppgd {

// Closed convex constraint set with an exact Euclidean projection.
struct ConstraintSet {
  enum class Kind { whole_space, box, ball, halfspace };

  Kind kind = Kind::whole_space;
  int dimension = 0;
  Eigen::VectorXd lower, upper;     // box
  Eigen::VectorXd center;          // ball
  double radius = 0.0;             // ball
  Eigen::VectorXd normal;          // halfspace: { x : <normal, x> <= offset }
  double offset = 0.0;

  static ConstraintSet whole_space(int dim) {
    if (dim < 1) throw Error("whole_space: need dim >= 1");
    ConstraintSet s;
    s.kind = Kind::whole_space;
    s.dimension = dim;
    return s;
  }

  static ConstraintSet box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw DimensionMismatch("box: bound sizes disagree");
    if ((lo.array() > hi.array()).any())
      throw Error("box: lower bound exceeds upper bound");
    ConstraintSet s;
    s.kind = Kind::box;
    s.dimension = static_cast<int>(lo.size());
    s.lower = std::move(lo);
    s.upper = std::move(hi);
    return s;
  }

  static ConstraintSet uniform_box(int dim, double lo, double hi) {
    return box(Eigen::VectorXd::Constant(dim, lo),
               Eigen::VectorXd::Constant(dim, hi));
  }

  static ConstraintSet ball(Eigen::VectorXd c, double r) {
    if (c.size() == 0) throw DimensionMismatch("ball: empty center");
    if (!(r >= 0.0)) throw Error("ball: radius must be >= 0");
    ConstraintSet s;
    s.kind = Kind::ball;
    s.dimension = static_cast<int>(c.size());
    s.center = std::move(c);
    s.radius = r;
    return s;
  }

  static ConstraintSet halfspace(Eigen::VectorXd a, double b) {
    if (a.size() == 0) throw DimensionMismatch("halfspace: empty normal");
    if (a.norm() == 0.0) throw Error("halfspace: normal must be nonzero");
    ConstraintSet s;
    s.kind = Kind::halfspace;
    s.dimension = static_cast<int>(a.size());
    s.normal = std::move(a);
    s.offset = b;
    return s;
  }

  bool contains(const Eigen::VectorXd& v, double tol = 0.0) const {
    if (v.size() != dimension) return false;
    switch (kind) {
      case Kind::whole_space:
        return true;
      case Kind::box:
        return (v.array() >= lower.array() - tol).all() &&
               (v.array() <= upper.array() + tol).all();
      case Kind::ball:
        return (v - center).norm() <= radius + tol;
      case Kind::halfspace:
        return normal.dot(v) <= offset + tol;
    }
    return false;
  }
};

// Euclidean projection onto the set.  Idempotent; a point already inside is
// returned unchanged.
inline Eigen::VectorXd project(const ConstraintSet& s,
                               const Eigen::VectorXd& v) {
  if (v.size() != s.dimension)
    throw DimensionMismatch("project: point has dimension " +
                            std::to_string(v.size()) + ", set expects " +
                            std::to_string(s.dimension));
  switch (s.kind) {
    case ConstraintSet::Kind::whole_space:
      return v;
    case ConstraintSet::Kind::box:
      return v.cwiseMax(s.lower).cwiseMin(s.upper);
    case ConstraintSet::Kind::ball: {
      const Eigen::VectorXd d = v - s.center;
      const double norm = d.norm();
      if (norm <= s.radius) return v;
      return s.center + d * (s.radius / norm);
    }
    case ConstraintSet::Kind::halfspace: {
      const double slack = s.normal.dot(v) - s.offset;
      if (slack <= 0.0) return v;
      return v - (slack / s.normal.squaredNorm()) * s.normal;
    }
  }
  throw Error("project: unknown set kind");
}

}  // namespace dppgd
