#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mpcert {

// ---------------------------------------------------------------------------
// error types

/// Invalid argument value (dimension, exponent, radius, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A hypothesis needed by an operation does not hold for the given data.
struct HypothesisViolation : std::runtime_error {
  HypothesisViolation(std::string hypothesis, const std::string& what)
      : std::runtime_error(hypothesis + ": " + what), hypothesis(std::move(hypothesis)) {}
  std::string hypothesis;
};

/// Caller violated a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical machinery broke an internal contract.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// x^e with a multiply chain when e is a small integer; std::pow otherwise
inline double fast_pow(double x, double e) {
  if (e == static_cast<int>(e) && e >= -16.0 && e <= 16.0) {
    int n = static_cast<int>(e);
    const bool inv = n < 0;
    if (inv) n = -n;
    double acc = 1.0, b = x;
    for (; n; n >>= 1, b *= b)
      if (n & 1) acc *= b;
    return inv ? 1.0 / acc : acc;
  }
  return std::pow(x, e);
}

/// 2* = 2N/(N-2)
inline double critical_exponent(int N) { return 2.0 * N / (N - 2.0); }

/// Surface measure of the unit sphere S^{N-1}, 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

/// Lebesgue measure of the N-ball of radius r.
double ball_volume(int N, double r);

// ---------------------------------------------------------------------------
// potential

enum class PotentialFamily {
  constant,       // V = amplitude
  inverse_power,  // V = amplitude (1+r)^-gamma
  well_decay,     // V = amplitude (1+r)^-gamma - depth (1 - (r/width)^2)_+
  exp_decay,      // V = amplitude exp(-rate r^power)
  quadratic,      // V = c2 r^2 - c0
};

struct PotentialParams {
  PotentialFamily family = PotentialFamily::inverse_power;
  double amplitude = kNaN;  // NaN: take the problem's lambda
  double gamma = 1.0;
  double depth = 0.0;
  double width = 1.0;
  double rate = 1.0;
  double power = 1.0;
  double c0 = 0.0;
  double c2 = 1.0;
};

/// Weighted profile h(r) = scale * W(r) * V(r) whose infimum over [R, inf)
/// appears in the decay hypotheses. W(r) = r^exponent or exp(mu r^exponent).
struct TailWeight {
  enum class Kind { power, exponential };
  Kind kind = Kind::power;
  double exponent = 0.0;
  double mu = 0.0;
  double scale = 1.0;

  double operator()(double r) const {
    return kind == Kind::power ? scale * std::pow(r, exponent)
                               : scale * std::exp(mu * std::pow(r, exponent));
  }
};

/// Closed-form statement about h on [monotone_from, inf): either
/// non-decreasing, or non-increasing towards `limit`.
struct TailBehavior {
  double monotone_from = 0.0;
  bool increasing = true;
  double limit = kInf;
};

class Potential {
 public:
  explicit Potential(PotentialParams params);

  double operator()(double r) const;
  TailBehavior tail(const TailWeight& weight, double r_from) const;
  const PotentialParams& params() const { return params_; }

 private:
  PotentialParams params_;
};

PotentialFamily potential_family_from_string(const std::string& name);
std::string to_string(PotentialFamily family);

// ---------------------------------------------------------------------------
// nonlinearity

enum class NonlinearityFamily {
  power,        // w(r) [c1 s^(gamma1-1) + c2 s^(gamma2-1)],  s > 0
  exponential,  // w(r) c1 s^(exponent-1) exp(-decay / s^order), s > 0
};

struct NonlinearityParams {
  NonlinearityFamily family = NonlinearityFamily::power;
  double c1 = 1.0;
  double gamma1 = 3.0;
  double c2 = 0.0;
  double gamma2 = 4.0;
  double modulation = 0.0;  // w(r) = 1 + modulation / (1 + r^2)
  double exponent = 3.0;
  double decay = 1.0;
  double order = 1.0;
};

/// f(r, s). Vanishes for s <= 0 unless odd, in which case f(r,-s) = -f(r,s).
class Nonlinearity {
 public:
  Nonlinearity(NonlinearityParams params, bool odd);

  double operator()(double r, double s) const;
  /// F(r,s) = int_0^s f(r,t) dt
  double primitive(double r, double s) const;
  bool autonomous() const { return params_.modulation == 0.0; }
  bool odd() const { return odd_; }
  const NonlinearityParams& params() const { return params_; }

 private:
  double positive_branch(double r, double s) const;
  double positive_primitive(double r, double s) const;

  NonlinearityParams params_;
  bool odd_;
};

NonlinearityFamily nonlinearity_family_from_string(const std::string& name);
std::string to_string(NonlinearityFamily family);

// ---------------------------------------------------------------------------

enum class Mode { standard, exponential };

/// Everything that defines -Lap u + V(|x|) u = f(|x|, u) on R^N together with
/// the constants of the growth and decay hypotheses.
struct ProblemSpec {
  int dimension = 3;
  PotentialParams potential;
  NonlinearityParams nonlinearity;
  double q = 3.0;        // behaviour of f at the origin
  double p = 3.0;        // subcritical growth exponent
  double a1 = 1.0;
  double a2 = 0.0;
  double theta = 3.0;    // Ambrosetti-Rabinowitz exponent
  double s0 = 0.0;
  double radius_R = 1.0;
  double lambda = 1.0;
  double r0 = 0.5;       // bump ball B_{r0}(0)
  double v_infty = kNaN; // NaN: max(0, sup of V on B_{r0})
  double exp_a = 1.0;
  double exp_mu = 1.0;
  Mode mode = Mode::standard;
  bool odd = false;

  Potential V() const;
  Nonlinearity f() const;
  double critical() const { return critical_exponent(dimension); }
  /// (N-2)(q-2)
  double decay_exponent() const { return (dimension - 2.0) * (q - 2.0); }
  /// V_infty actually used for the bump ball.
  double bump_ceiling() const;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

}  // namespace mpcert
