#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace dppgd {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphError : Error {
  using Error::Error;
};

struct NotStronglyConnected : GraphError {
  NotStronglyConnected() : GraphError("graph is not strongly connected") {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct EigenSolverFailure : Error {
  using Error::Error;
};

// A cost evaluation returned NaN/Inf; carries the offending point.
class NonFiniteCost : public Error {
 public:
  explicit NonFiniteCost(Eigen::VectorXd point)
      : Error("cost evaluation returned a non-finite value"),
        point_(std::move(point)) {}

  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

// State exceeded the divergence guard; carries the failing round.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(long round)
      : Error("state diverged at round " + std::to_string(round)),
        round_(round) {}

  long round() const { return round_; }

 private:
  long round_;
};

}  // namespace dppgd
