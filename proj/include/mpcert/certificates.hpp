#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpcert/hypotheses.hpp"
#include "mpcert/mountain_pass.hpp"
#include "mpcert/radial.hpp"

namespace mpcert {

/// The quantities a Moser bound depends on besides u.
struct MoserContext {
  double alpha = 0.0;
  double omega_measure = 0.0;
  double S = kNaN;
};

MoserContext moser_context(const ProblemSpec& spec, const SampleProbe& probe = {});

struct MoserConstants {
  double tau = kNaN;
  double tau_prime = kNaN;
  double sigma = kNaN;
  double kappa = kNaN;  // 2 sigma / (sigma - 1)
  double a3 = kNaN;
  double a4 = kNaN;
  double C1 = kNaN;
  double C2 = kNaN;
  double C3 = kNaN;
  double M = kNaN;
  double u_norm = kNaN;  // the |u|_{2*} it was evaluated at
};

/// L-infinity bound for a solution with |u|_{2*} = u_norm. M comes from the
/// ungrouped final inequality; C1..C3 are the grouped form, for display.
MoserConstants moser_constants(const ProblemSpec& spec, double u_norm, const MoserContext& ctx);
MoserConstants moser_constants(const ProblemSpec& spec, double u_norm);

struct EnergyBounds {
  double K = kNaN;
  double C_ar = kNaN;
  double d = kNaN;
  double ball_R = kNaN;      // |B_R|
  double norm_bound = kNaN;  // bound on ||u||^2
  double hat_C = kNaN;       // bound on |u|_{2*}
  double beta = kNaN;
  double rho = kNaN;
  double level = kNaN;
};

/// Throws HypothesisViolation("(V1)") when S <= alpha |Omega|^{2/N}.
EnergyBounds energy_bounds(const ProblemSpec& spec, double d, double alpha, double omega_measure, double S,
                           double C_ar);

struct CheckRecord {
  std::string name;
  bool pass = false;
  double margin = kNaN;
  std::vector<std::pair<std::string, double>> constants;
  std::string provenance;
  std::string note;
};

CheckRecord check_norm_bound(const DiscreteProblem& problem, const DiscreteRadialFunction& u,
                             const EnergyBounds& bounds);
CheckRecord check_norm_bound(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                             const EnergyBounds& bounds);
/// |u_i| <= M (R/r_i)^{N-2} (1 + 1e-8) at every node r_i >= R.
CheckRecord check_decay(const RadialGrid& grid, const DiscreteRadialFunction& u, double M, double R);
/// k |f(r_i, u_i)| <= V(r_i) |u_i| + 1e-12 at every node r_i >= R.
CheckRecord check_consistency(const RadialGrid& grid, const ProblemSpec& spec, const PenalizedNonlinearity& pen,
                              const DiscreteRadialFunction& u);
/// max |u_i| <= M(|u|_{2*}) (1 + 1e-6).
CheckRecord check_linf_bound(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                             const MoserContext& ctx);

struct Thresholds {
  double k = kNaN;
  double C = kNaN;      // growth constant near zero, evaluated up to M_hat
  double M_hat = kNaN;
  double R = kNaN;
  double decay_exponent = kNaN;
  double lambda_star = kNaN;
  double lambda_tilde_star = kNaN;
  // exponential regime
  double a_hat = kNaN;
  double mu_star = kNaN;
  double Lambda_star_exp = kNaN;
  double mu_hat_star = kNaN;
};

/// k C M_hat^{q-2} R^{(N-2)(q-2)}
double lambda_star_formula(double k, double C, double M_hat, double q, int N, double R);

/// Fills every threshold of the active mode; C = growth_constant_near_zero(spec, M_hat).
Thresholds thresholds(const ProblemSpec& spec, const EnergyBounds& bounds, double M_hat);

/// Everything the d -> K -> hat C -> hat M -> C -> thresholds chain needs.
struct ChainInputs {
  ProblemSpec spec;
  MoserContext moser;
  double C_ar = 0.0;
};

struct Chain {
  EnergyBounds bounds;
  MoserConstants moser_hat;  // evaluated at hat C
  Thresholds thr;
};

ChainInputs chain_inputs(const ProblemSpec& spec, const SampleProbe& probe = {});
Chain constant_chain(const ChainInputs& in, double d);

struct MultiBump {
  std::vector<DiscreteRadialFunction> bumps;
  std::vector<double> d;
  double D_l = kNaN;
  double lambda_star_l = kNaN;
};

/// l nested radial shells of width r0/l inside B_{r0}: the innermost is the
/// default bump scaled to r0/l, the others are annular bumps. Throws
/// PreconditionError when a shell spans fewer than 4 cells.
std::vector<DiscreteRadialFunction> shell_bumps(const RadialGrid& grid, double r0, int l);
MultiBump multi_bump_D_l(const ChainInputs& in, int l, const RadialGrid& grid, const GrowthFloor& floor);

struct MoserStep {
  int j = 0;
  double log_lhs = kNaN;  // log |v|_{2* s^j}^{2 s^j}
  double log_rhs = kNaN;
  double ratio = kNaN;    // rhs / lhs, +inf when lhs = 0
  bool pass = false;
};

struct MoserChain {
  std::vector<MoserStep> steps;
  bool pass = true;
  bool truncated = false;
  std::string note;
};

/// Both sides of the iterated Moser inequality for v = (|u| - a2)^+, j = 1..j_max,
/// in the log domain. j_max is limited to 5.
MoserChain moser_diagnostic(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                            int j_max, const MoserContext& ctx);

struct SweepEntry {
  double R = kNaN;
  double Lambda = kNaN;
  double ratio = kNaN;        // Lambda / R^{(N-2)(q-2)}
  double lambda_star = kNaN;  // at R = R_j
  bool meets = false;         // Lambda >= lambda_star
  double lambda_star_l = kNaN;
  bool meets_l = false;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::string trend;  // "unbounded" or "bounded"; a heuristic on the finite window
};

/// Per-pair threshold comparisons with the problem's V and d; only R changes.
/// l > 1 also compares against lambda_star_l.
SweepReport sweep_check(const std::vector<SweepPair>& pairs, const ChainInputs& in, double d, double D_l = kNaN);

/// "unbounded" when the ratios over the last half of the window strictly increase.
std::string sweep_trend(const std::vector<double>& ratios);

}  // namespace mpcert
