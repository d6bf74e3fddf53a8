#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpcert/problem.hpp"

namespace mpcert {

/// Best constant of D^{1,2}(R^N) -> L^{2*}(R^N):  N(N-2) pi (Gamma(N/2)/Gamma(N))^{2/N}.
double sobolev_constant(int N);

/// Absolute 1e-12 plus relative 1e-8, used wherever a hypothesis compares two
/// floating-point quantities.
inline bool within_tol(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 + 1e-8 * std::abs(rhs);
}

/// Where the hypothesis checks sample f and V.
struct SampleProbe {
  double s_max = 10.0;
  int s_decades = 10;         // s from s_max * 10^-s_decades up to s_max
  int s_per_decade = 24;
  double r_max = 20.0;
  int r_samples = 33;
  int v_samples = 4096;       // radial resolution for V scans

  std::vector<double> s_values() const;  // positive, increasing
  std::vector<double> r_values() const;  // [0, r_max]
};

/// Result of an infimum of W(r) V(r) over [R, inf).
struct TailInfimum {
  double value = kNaN;
  double argmin = kNaN;   // kInf when the infimum is the limit at infinity
  bool certified = true;  // false: closed-form tail unavailable, sampled only
};

TailInfimum tail_infimum(const Potential& V, const TailWeight& w, double R, const SampleProbe& probe);

struct OmegaStats {
  double omega_measure = 0.0;
  double alpha = 0.0;
  bool bounded = true;         // Omega = {V < 0} bounded
  double omega_radius = 0.0;   // Omega inside B_{omega_radius}
  bool v_bounded_below = true;
};

OmegaStats omega_stats(const ProblemSpec& spec, const SampleProbe& probe);

enum class CheckMode { standard, exponential, sweep };
enum class V1Case { nonnegative_with_well, sign_changing };

struct SweepPair {
  double R = 0.0;
  double Lambda = 0.0;
};

struct HypothesisReport {
  CheckMode mode = CheckMode::standard;

  double f1_bound = kNaN;
  bool f1_ok = false;
  double f_hat1_bound = kNaN;
  bool f_hat1_ok = false;
  double f2_margin = kNaN;
  bool f2_ok = false;
  bool f3_ok = false;
  std::optional<std::pair<double, double>> f3_witness;  // (r, s) of first failing sample
  bool f4_ok = true;

  V1Case v1_case = V1Case::nonnegative_with_well;
  double omega_measure = 0.0;
  double alpha = 0.0;
  double sobolev_S = kNaN;
  double v1_margin = kInf;
  bool v1_ok = false;
  double v_infty = kNaN;
  bool v12_ok = false;

  double v2_inf = kNaN;   // inf_{r>=R} r^{(N-2)(q-2)} V(r)
  bool v2_ok = false;
  double v3_inf = kNaN;   // v2_inf / R^{(N-2)(q-2)}
  double v4_inf = kNaN;   // inf_{r>=R} exp(mu r^{(N-2)q}) V(r)
  bool v4_ok = false;
  double v6_inf = kNaN;   // inf_{r>=R} exp(mu (r/R)^{(N-2)q}) V(r)
  bool v6_ok = false;
  std::vector<double> v5_inf;  // per sweep pair, inf over r >= R_j
  std::vector<bool> v5_ok;     // v5_inf[j] >= Lambda_j

  bool tail_certified = true;
  std::vector<std::string> warnings;

  /// Conjunction of the flags relevant for the mode.
  bool all_ok() const;
  /// Names of the failing hypotheses, e.g. {"(f2)", "(V1)"}.
  std::vector<std::string> failures() const;
};

HypothesisReport check_hypotheses(const ProblemSpec& spec, const SampleProbe& probe, CheckMode mode,
                                  const std::vector<SweepPair>& sweep = {});

/// Constant C of |f(r,s)| <= C |s|^{q-1} for |s| <= cap (standard mode) or
/// |f(r,s)| <= C exp(-a_hat/|s|^q) |s| with a_hat = a/2 (exponential mode).
/// Throws HypothesisViolation when the supremum diverges towards s = 0.
double growth_constant_near_zero(const ProblemSpec& spec, double cap, const SampleProbe& probe = {});

/// max(0, sup_{r<=R, |s|<=S0(1+delta)} F(r,s) - s f(r,s)/theta); 0 when S0 = 0.
double ar_defect_constant(const ProblemSpec& spec, const SampleProbe& probe = {});

}  // namespace mpcert
