#pragma once

#include "mpcert/radial.hpp"

namespace mpcert {

/// The shooting bracket never separated the two behaviours.
struct OracleInconclusive : SolverError {
  using SolverError::SolverError;
};

struct ShootingResult {
  explicit ShootingResult(const RadialGrid& grid) : profile(grid) {}
  DiscreteRadialFunction profile;
  double u0 = kNaN;       // separating initial value
  double bracket = kNaN;  // final relative width of [s_lo, s_hi]
  int bisections = 0;
};

/// Ground state of u'' + (N-1)/r u' = V(r) u - f(u), u'(0) = 0, found by
/// bisecting u(0) between runs that turn upward while positive and runs that
/// cross zero. Needs f autonomous in r. Unrelated to the mountain-pass solver.
ShootingResult shooting_oracle(const ProblemSpec& spec, const RadialGrid& grid);

}  // namespace mpcert
