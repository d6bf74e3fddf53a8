#include "mpcert/problem.hpp"

#include <algorithm>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace mpcert {

double sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double ball_volume(int N, double r) { return sphere_area(N) * std::pow(r, N) / N; }

// ---------------------------------------------------------------------------

Potential::Potential(PotentialParams params) : params_(params) {
  if (std::isnan(params_.amplitude)) throw DomainError("potential amplitude unresolved");
}

double Potential::operator()(double r) const {
  const auto& P = params_;
  switch (P.family) {
    case PotentialFamily::constant:
      return P.amplitude;
    case PotentialFamily::inverse_power:
      return P.amplitude * fast_pow(1.0 + r, -P.gamma);
    case PotentialFamily::well_decay: {
      const double x = r / P.width;
      return P.amplitude * fast_pow(1.0 + r, -P.gamma) - P.depth * std::max(0.0, 1.0 - x * x);
    }
    case PotentialFamily::exp_decay:
      return P.amplitude * std::exp(-P.rate * std::pow(r, P.power));
    case PotentialFamily::quadratic:
      return P.c2 * r * r - P.c0;
  }
  return kNaN;
}

namespace {

// Smallest r >= lo with phi(r) >= target for an increasing phi.
template <class Phi>
double first_crossing(Phi phi, double lo, double target) {
  if (phi(lo) >= target) return lo;
  double hi = std::max(1.0, 2.0 * lo);
  while (phi(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

// Tail behaviour of W(r) * shape(r) for a positive shape; the amplitude sign is
// applied by the caller.
TailBehavior inverse_power_tail(double gamma, const TailWeight& w, double r_from) {
  if (w.kind == TailWeight::Kind::power) {
    const double beta = w.exponent;
    if (beta >= gamma) {
      // r d/dr log h = beta - gamma r/(1+r) >= beta - gamma >= 0
      return {r_from, true, beta == gamma ? w.scale : kInf};
    }
    const double turn = beta / (gamma - beta);
    return {std::max(r_from, turn), false, 0.0};
  }
  // d/dr log h = mu kappa r^(kappa-1) - gamma/(1+r); mu kappa r^(kappa-1)(1+r)
  // increases for r > (1-kappa)/kappa.
  const double kappa = w.exponent;
  const double rc = std::max(0.0, (1.0 - kappa) / kappa);
  auto phi = [&](double r) { return w.mu * kappa * std::pow(r, kappa - 1.0) * (1.0 + r); };
  const double lo = std::max(r_from, rc);
  return {first_crossing(phi, std::max(lo, 1e-300), gamma), true, kInf};
}

TailBehavior exp_decay_tail(double rate, double power, const TailWeight& w, double r_from) {
  if (w.kind == TailWeight::Kind::power) {
    // r d/dr log h = beta - rate power r^power, decreasing in r
    const double turn = std::pow(w.exponent / (rate * power), 1.0 / power);
    return {std::max(r_from, turn), false, 0.0};
  }
  const double kappa = w.exponent;
  if (kappa > power) {
    const double turn = std::pow(rate * power / (w.mu * kappa), 1.0 / (kappa - power));
    return {std::max(r_from, turn), true, kInf};
  }
  if (kappa < power) {
    const double turn = std::pow(w.mu * kappa / (rate * power), 1.0 / (power - kappa));
    return {std::max(r_from, turn), false, 0.0};
  }
  if (w.mu >= rate) return {r_from, true, w.mu == rate ? w.scale : kInf};
  return {r_from, false, 0.0};
}

TailBehavior flip(TailBehavior t, double amplitude) {
  if (amplitude > 0.0) {
    t.limit *= amplitude;
    return t;
  }
  if (amplitude == 0.0) return {t.monotone_from, true, 0.0};
  // negative amplitude mirrors the monotonicity
  if (t.increasing) {
    return {t.monotone_from, false, std::isinf(t.limit) ? -kInf : amplitude * t.limit};
  }
  return {t.monotone_from, true, kInf};
}

}  // namespace

TailBehavior Potential::tail(const TailWeight& w, double r_from) const {
  const auto& P = params_;
  switch (P.family) {
    case PotentialFamily::constant: {
      const bool weight_constant = w.kind == TailWeight::Kind::power && w.exponent == 0.0;
      if (weight_constant || P.amplitude == 0.0) return {r_from, P.amplitude >= 0.0, P.amplitude * w.scale};
      if (P.amplitude > 0.0) return {r_from, true, kInf};
      return {r_from, false, -kInf};
    }
    case PotentialFamily::inverse_power:
      return flip(inverse_power_tail(P.gamma, w, r_from), P.amplitude);
    case PotentialFamily::well_decay:
      return flip(inverse_power_tail(P.gamma, w, std::max(r_from, P.width)), P.amplitude);
    case PotentialFamily::exp_decay:
      return flip(exp_decay_tail(P.rate, P.power, w, r_from), P.amplitude);
    case PotentialFamily::quadratic: {
      if (P.c2 > 0.0) {
        const double positive_from = P.c0 > 0.0 ? std::sqrt(P.c0 / P.c2) : 0.0;
        return {std::max(r_from, positive_from), true, kInf};
      }
      if (P.c2 == 0.0) return flip({r_from, true, w.scale}, -P.c0);
      return {r_from, false, -kInf};
    }
  }
  return {r_from, true, kInf};
}

PotentialFamily potential_family_from_string(const std::string& name) {
  if (name == "constant") return PotentialFamily::constant;
  if (name == "inverse_power") return PotentialFamily::inverse_power;
  if (name == "well_decay") return PotentialFamily::well_decay;
  if (name == "exp_decay") return PotentialFamily::exp_decay;
  if (name == "quadratic") return PotentialFamily::quadratic;
  throw DomainError("unknown potential family '" + name + "'");
}

std::string to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::constant: return "constant";
    case PotentialFamily::inverse_power: return "inverse_power";
    case PotentialFamily::well_decay: return "well_decay";
    case PotentialFamily::exp_decay: return "exp_decay";
    case PotentialFamily::quadratic: return "quadratic";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Nonlinearity::Nonlinearity(NonlinearityParams params, bool odd) : params_(params), odd_(odd) {}

double Nonlinearity::positive_branch(double r, double s) const {
  const auto& P = params_;
  const double w = 1.0 + P.modulation / (1.0 + r * r);
  if (P.family == NonlinearityFamily::power) {
    double v = P.c1 * fast_pow(s, P.gamma1 - 1.0);
    if (P.c2 != 0.0) v += P.c2 * fast_pow(s, P.gamma2 - 1.0);
    return w * v;
  }
  return w * P.c1 * fast_pow(s, P.exponent - 1.0) * std::exp(-P.decay / fast_pow(s, P.order));
}

double Nonlinearity::positive_primitive(double r, double s) const {
  const auto& P = params_;
  if (P.family == NonlinearityFamily::power) {
    const double w = 1.0 + P.modulation / (1.0 + r * r);
    double v = P.c1 * fast_pow(s, P.gamma1) / P.gamma1;
    if (P.c2 != 0.0) v += P.c2 * fast_pow(s, P.gamma2) / P.gamma2;
    return w * v;
  }
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double t) { return t > 0.0 ? positive_branch(r, t) : 0.0; };
  return gauss_kronrod<double, 31>::integrate(integrand, 0.0, s, 15, 1e-13);
}

double Nonlinearity::operator()(double r, double s) const {
  if (s > 0.0) return positive_branch(r, s);
  if (s < 0.0 && odd_) return -positive_branch(r, -s);
  return 0.0;
}

double Nonlinearity::primitive(double r, double s) const {
  if (s > 0.0) return positive_primitive(r, s);
  if (s < 0.0 && odd_) return positive_primitive(r, -s);
  return 0.0;
}

NonlinearityFamily nonlinearity_family_from_string(const std::string& name) {
  if (name == "power") return NonlinearityFamily::power;
  if (name == "exponential") return NonlinearityFamily::exponential;
  throw DomainError("unknown nonlinearity family '" + name + "'");
}

std::string to_string(NonlinearityFamily family) {
  return family == NonlinearityFamily::power ? "power" : "exponential";
}

// ---------------------------------------------------------------------------

Potential ProblemSpec::V() const {
  PotentialParams params = potential;
  if (std::isnan(params.amplitude)) params.amplitude = lambda;
  return Potential(params);
}

Nonlinearity ProblemSpec::f() const { return Nonlinearity(nonlinearity, odd); }

double ProblemSpec::bump_ceiling() const {
  if (!std::isnan(v_infty)) return v_infty;
  const Potential pot = V();
  double vmax = 0.0;
  constexpr int samples = 2048;
  for (int i = 0; i <= samples; ++i) vmax = std::max(vmax, pot(r0 * i / samples));
  return vmax;
}

void ProblemSpec::validate() const {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw DomainError("problem." + key + ": " + why);
  };
  if (dimension < 3) fail("dimension", "must be >= 3");
  const double crit = critical();
  if (!(p > 2.0 && p < crit)) fail("p", "must satisfy 2 < p < 2N/(N-2) = " + std::to_string(crit));
  if (mode == Mode::standard ? !(q > 2.0) : !(q > 0.0)) fail("q", mode == Mode::standard ? "must be > 2" : "must be > 0");
  if (!(theta > 2.0)) fail("theta", "must be > 2");
  if (!(a1 > 0.0)) fail("a1", "must be > 0");
  if (!(a2 >= 0.0)) fail("a2", "must be >= 0");
  if (!(s0 >= 0.0)) fail("s0", "must be >= 0");
  if (!(radius_R > 0.0)) fail("radius_R", "must be > 0");
  if (!(lambda > 0.0)) fail("lambda", "must be > 0");
  if (!(r0 > 0.0)) fail("r0", "must be > 0");
  if (!(radius_R > r0)) fail("radius_R", "must exceed r0");
  if (!std::isnan(v_infty) && !(v_infty >= 0.0)) fail("v_infty", "must be >= 0");
  if (mode == Mode::exponential) {
    if (!(exp_a > 0.0)) fail("exponential.a", "must be > 0");
    if (!(exp_mu > 0.0)) fail("exponential.mu", "must be > 0");
  }
  const auto& nl = nonlinearity;
  if (nl.family == NonlinearityFamily::power && (nl.gamma1 < 1.0 || (nl.c2 != 0.0 && nl.gamma2 < 1.0)))
    fail("nonlinearity", "power exponents must be >= 1");
  if (nl.modulation < 0.0) fail("nonlinearity.modulation", "must be >= 0");
}

}  // namespace mpcert
