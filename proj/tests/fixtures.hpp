#pragma once

#include "mpcert/problem.hpp"

namespace fixture {

// V = lambda/(1+r), f = (s+)^2, N = 3
inline mpcert::ProblemSpec p1(double lambda = 1.0, double R = 1.0, double r0 = 0.95) {
  mpcert::ProblemSpec s;
  s.dimension = 3;
  s.potential.family = mpcert::PotentialFamily::inverse_power;
  s.potential.gamma = 1.0;
  s.nonlinearity.family = mpcert::NonlinearityFamily::power;
  s.nonlinearity.c1 = 1.0;
  s.nonlinearity.gamma1 = 3.0;
  s.nonlinearity.c2 = 0.0;
  s.q = 3.0;
  s.p = 3.0;
  s.a1 = 1.0;
  s.a2 = 0.0;
  s.theta = 3.0;
  s.s0 = 0.0;
  s.radius_R = R;
  s.lambda = lambda;
  s.r0 = r0;
  return s;
}

// V = 1, f = (s+)^2
inline mpcert::ProblemSpec sanity() {
  mpcert::ProblemSpec s = p1(1.0, 10.0, 2.0);
  s.potential.family = mpcert::PotentialFamily::constant;
  s.potential.amplitude = 1.0;
  return s;
}

}  // namespace fixture
