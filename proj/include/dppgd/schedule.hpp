#pragma once

#include <cmath>

#include "dppgd/errors.hpp"

namespace dppgd {

// Step-size sequence alpha_k.  All variants are positive and non-increasing.
struct StepSchedule {
  enum class Kind { power, constant_horizon, constant_step };

  Kind kind = Kind::power;
  double alpha0 = 0.1;
  double exponent = 0.5;  // power only
  long horizon = 0;       // constant_horizon only

  // alpha0 / (k+1)^exponent; exponent = 0 degenerates to a constant step.
  static StepSchedule power(double alpha0, double exponent) {
    if (!(alpha0 > 0.0)) throw Error("StepSchedule: alpha0 must be positive");
    if (!(exponent >= 0.0))
      throw Error("StepSchedule: exponent must be >= 0");
    StepSchedule s;
    s.kind = Kind::power;
    s.alpha0 = alpha0;
    s.exponent = exponent;
    return s;
  }

  // alpha0 / sqrt(horizon + 2), constant over the whole run.
  static StepSchedule constant_horizon(double alpha0, long horizon) {
    if (!(alpha0 > 0.0)) throw Error("StepSchedule: alpha0 must be positive");
    if (horizon < 0) throw Error("StepSchedule: horizon must be >= 0");
    StepSchedule s;
    s.kind = Kind::constant_horizon;
    s.alpha0 = alpha0;
    s.horizon = horizon;
    return s;
  }

  // alpha0 = 0 is allowed here: a zero-step run exercises the pure
  // mixing dynamics, which is useful for consensus-rate diagnostics.
  static StepSchedule constant(double alpha0) {
    if (!(alpha0 >= 0.0)) throw Error("StepSchedule: alpha0 must be >= 0");
    StepSchedule s;
    s.kind = Kind::constant_step;
    s.alpha0 = alpha0;
    return s;
  }

  double alpha(long k) const {
    switch (kind) {
      case Kind::power:
        return alpha0 / std::pow(static_cast<double>(k + 1), exponent);
      case Kind::constant_horizon:
        return alpha0 / std::sqrt(static_cast<double>(horizon + 2));
      case Kind::constant_step:
        return alpha0;
    }
    throw Error("StepSchedule: unknown kind");
  }
};

}  // namespace dppgd
