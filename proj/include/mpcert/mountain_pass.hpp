#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpcert/radial.hpp"

namespace mpcert {

struct MpaOptions {
  int m = 64;                // path has m+1 vertices
  double tol = 1e-8;         // residual <= tol * max(1, ||u||)
  int max_iter = 5000;
  double step = 1.0;         // first Armijo trial step
  double armijo_c1 = 1e-4;
  double step_floor = 1e-14;
  int redistribute_every = 50;
};

struct SolveResult {
  explicit SolveResult(const RadialGrid& grid) : u(grid) {}
  DiscreteRadialFunction u;
  double level = kNaN;
  double residual = kNaN;
  int iterations = 0;
  std::vector<double> path_max_history;
  bool converged = false;
  bool nonnegative = true;  // min u >= -1e-8 (checked outside odd mode)
  std::string diagnostic;
};

/// phi(r) = (1 - (r/r0)^2)^2 on [0, r0), zero beyond.
DiscreteRadialFunction default_bump(const RadialGrid& grid, double r0);

/// e = t bump with t doubled from 1 until J(e) < 0.
DiscreteRadialFunction find_endpoint_e(const DiscreteProblem& problem, const DiscreteRadialFunction& bump);
DiscreteRadialFunction find_endpoint_e(const RadialGrid& grid, const PenalizedNonlinearity& pen,
                                       const ProblemSpec& spec, const DiscreteRadialFunction& bump);

struct BetaRho {
  double beta = 0.0;
  double rho = 0.0;
  bool found = false;
  std::string warning;
};

/// Empirical floor of J on spheres ||u|| = rho over random smooth directions
/// (plus any `extra` directions). Not a proof.
BetaRho estimate_beta_rho(const DiscreteProblem& problem, int trial_count, std::uint64_t seed = 42,
                          std::span<const DiscreteRadialFunction> extra = {});

SolveResult mpa_solve(const DiscreteProblem& problem, const DiscreteRadialFunction& e, const MpaOptions& opts = {});

/// Constants of F(r,s) >= C1 s^theta - C2 on B_{r0} x [0, inf).
struct GrowthFloor {
  double c1 = 0.0;
  double c2 = 0.0;
};
GrowthFloor choose_growth_floor(const ProblemSpec& spec);

struct DBound {
  double A = 0.0;       // int (|grad phi|^2 + V_infty phi^2)
  double B = 0.0;       // c1 int |phi|^theta
  double t_star = 0.0;
  double d = 0.0;
};

/// sup_t [t^2 A/2 - B t^theta + c2 |B0|] in closed form; validates (c1, c2)
/// against F by sampling and throws HypothesisViolation if they fail.
DBound compute_d(const ProblemSpec& spec, const DiscreteRadialFunction& bump, double c1, double c2);

/// Closed-form maximiser used by compute_d.
DBound d_from_integrals(double A, double B, double theta, double c2_times_ball);

}  // namespace mpcert
