#include "mpcert/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace mpcert {

MoserContext moser_context(const ProblemSpec& spec, const SampleProbe& probe) {
  const OmegaStats om = omega_stats(spec, probe);
  return {om.alpha, om.omega_measure, sobolev_constant(spec.dimension)};
}

MoserConstants moser_constants(const ProblemSpec& spec, double u_norm, const MoserContext& ctx) {
  const double p = spec.p;
  const double two_star = critical_exponent(spec.dimension);
  if (!(p > 2.0 && p < two_star)) throw DomainError("moser_constants: p must lie in (2, 2*)");
  if (!(u_norm >= 0.0)) throw PreconditionError("moser_constants: |u|_{2*} must be >= 0");
  const double a1 = spec.a1, a2 = spec.a2, alpha = ctx.alpha, om = ctx.omega_measure, S = ctx.S;

  MoserConstants m;
  m.u_norm = u_norm;
  m.tau = two_star / (p - 2.0);
  m.tau_prime = m.tau / (m.tau - 1.0);
  m.sigma = two_star / (2.0 * m.tau_prime);
  m.kappa = 2.0 * m.sigma / (m.sigma - 1.0);
  const double sk = std::pow(m.sigma, m.kappa);

  const double om_term = om > 0.0 ? std::pow(om, (p - 2.0) / two_star) : 0.0;
  m.a3 = 2.0 * a1 * std::pow(u_norm, p - 2.0) + alpha * om_term;
  double a4_core = 0.0;  // 2^{p-1} a2^{-p} (a1 a2^{p-2} + 1)(a2 + 1)
  if (a2 > 0.0) {
    a4_core = std::pow(2.0, p - 1.0) * std::pow(a2, -p) * (a1 * std::pow(a2, p - 2.0) + 1.0) * (a2 + 1.0);
    m.a4 = a4_core * std::pow(1.0 + u_norm, p - 1.0) + alpha * a2 * (1.0 + om);
  } else {
    m.a4 = 0.0;
  }
  const double a2_term = a2 > 0.0 ? std::pow(a2, 2.0 * (m.sigma - 1.0)) : 0.0;
  const double inner = sk * 2.0 / S * (m.a3 + m.a4) + 2.0 * sk + a2_term;
  m.M = std::pow(inner, 1.0 / (two_star - p)) * (1.0 + u_norm);

  // grouped form, using (1+u)^{p-1} <= 2^{p-2}(1 + u^{p-1})
  const double pre = 2.0 * sk / S;
  const double spread = std::pow(2.0, p - 2.0);
  m.C1 = pre * 2.0 * a1;
  m.C2 = pre * a4_core * spread;
  m.C3 = pre * (alpha * om_term + a4_core * spread + alpha * a2 * (1.0 + om)) + 2.0 * sk + a2_term;
  if (a2 == 0.0) m.C3 = pre * alpha * om_term + 2.0 * sk;
  return m;
}

MoserConstants moser_constants(const ProblemSpec& spec, double u_norm) {
  return moser_constants(spec, u_norm, moser_context(spec));
}

// ---------------------------------------------------------------------------

EnergyBounds energy_bounds(const ProblemSpec& spec, double d, double alpha, double omega_measure, double S,
                           double C_ar) {
  const double theta = spec.theta;
  if (!(theta > 2.0)) throw DomainError("energy_bounds: theta must be > 2");
  if (!(d > 0.0)) throw PreconditionError("energy_bounds: d must be > 0");
  const double well = alpha * std::pow(omega_measure, 2.0 / spec.dimension);
  if (!(S > well))
    throw HypothesisViolation("(V1)", "S = " + std::to_string(S) + " does not exceed alpha |Omega|^{2/N} = " +
                                          std::to_string(well));
  EnergyBounds b;
  b.d = d;
  b.C_ar = C_ar;
  b.K = (theta - 2.0) * (theta - 2.0) / (4.0 * theta * theta) * (1.0 - well / S);
  b.ball_R = ball_volume(spec.dimension, spec.radius_R);
  const double top = d + C_ar * b.ball_R;
  b.norm_bound = top / b.K;
  b.hat_C = std::sqrt(top / (b.K * (S - well)));
  return b;
}

// ---------------------------------------------------------------------------

CheckRecord check_norm_bound(const DiscreteProblem& problem, const DiscreteRadialFunction& u,
                             const EnergyBounds& bounds) {
  const double n2 = problem.norm_E_sq(u);
  CheckRecord c;
  c.name = "norm_bound";
  c.margin = bounds.norm_bound - n2;
  c.pass = c.margin >= -1e-6 * bounds.norm_bound;
  c.constants = {{"norm_sq", n2}, {"norm_bound", bounds.norm_bound}, {"K", bounds.K}, {"d", bounds.d},
                 {"C_ar", bounds.C_ar}, {"ball_R", bounds.ball_R}};
  c.provenance = "check_norm_bound: ||u||^2 <= K^-1 (d + C_ar |B_R|)";
  return c;
}

CheckRecord check_norm_bound(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                             const EnergyBounds& bounds) {
  const PenalizedNonlinearity pen(spec);
  return check_norm_bound(DiscreteProblem(grid, spec, pen), u, bounds);
}

CheckRecord check_decay(const RadialGrid& grid, const DiscreteRadialFunction& u, double M, double R) {
  CheckRecord c;
  c.name = "decay";
  c.pass = true;
  c.margin = kInf;
  const double e = grid.dimension() - 2.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    if (r < R) continue;
    ++checked;
    const double bound = M * std::pow(R / r, e);
    const double a = std::abs(u[i]);
    c.margin = std::min(c.margin, bound - a);
    if (a > bound * (1.0 + 1e-8)) c.pass = false;
  }
  c.constants = {{"M", M}, {"R", R}, {"nodes", static_cast<double>(checked)}};
  c.provenance = "check_decay: |u(r)| <= M (R/r)^{N-2} for r >= R";
  return c;
}

CheckRecord check_consistency(const RadialGrid& grid, const ProblemSpec& spec, const PenalizedNonlinearity& pen,
                              const DiscreteRadialFunction& u) {
  const Nonlinearity f = spec.f();
  const Potential V = spec.V();
  const double k = pen.k();
  CheckRecord c;
  c.name = "consistency";
  c.pass = true;
  c.margin = kInf;
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    const double fu = f(r, u[i]);
    if (pen.g(r, u[i]) != fu) ++mismatched;
    if (r < spec.radius_R) continue;
    const double lhs = k * std::abs(fu);
    const double rhs = V(r) * std::abs(u[i]);
    c.margin = std::min(c.margin, rhs - lhs);
    if (lhs > rhs + 1e-12) c.pass = false;
  }
  c.constants = {{"k", k}, {"R", spec.radius_R}, {"g_ne_f_nodes", static_cast<double>(mismatched)}};
  c.provenance = "check_consistency: k |f(r,u)| <= V(r) |u| for r >= R";
  if (c.pass && mismatched == 0) c.note = "g(r_i,u_i) = f(r_i,u_i) at every node: u solves the unpenalized equation";
  if (c.pass && mismatched > 0) c.note = std::to_string(mismatched) + " nodes sit within the 1e-12 slack on a clamp";
  return c;
}

CheckRecord check_linf_bound(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                             const MoserContext& ctx) {
  const double n2s = lp_norm(grid, u, critical_exponent(spec.dimension));
  const MoserConstants m = moser_constants(spec, n2s, ctx);
  const double sup = lp_norm(grid, u, kInf);
  CheckRecord c;
  c.name = "linf_bound";
  c.margin = m.M - sup;
  c.pass = sup <= m.M * (1.0 + 1e-6);
  c.constants = {{"sup_u", sup}, {"M", m.M}, {"u_2star", n2s}, {"a3", m.a3}, {"a4", m.a4}, {"sigma", m.sigma}};
  c.provenance = "moser_constants: sup|u| <= M(|u|_{2*})";
  return c;
}

// ---------------------------------------------------------------------------

double lambda_star_formula(double k, double C, double M_hat, double q, int N, double R) {
  return k * C * std::pow(M_hat, q - 2.0) * std::pow(R, (N - 2.0) * (q - 2.0));
}

Thresholds thresholds(const ProblemSpec& spec, const EnergyBounds& bounds, double M_hat) {
  (void)bounds;
  Thresholds t;
  t.k = 2.0 * spec.theta / (spec.theta - 2.0);
  t.M_hat = M_hat;
  t.R = spec.radius_R;
  t.decay_exponent = spec.decay_exponent();
  t.C = growth_constant_near_zero(spec, M_hat);
  if (spec.mode == Mode::standard) {
    t.lambda_star = lambda_star_formula(t.k, t.C, M_hat, spec.q, spec.dimension, spec.radius_R);
    t.lambda_tilde_star = t.C * std::pow(M_hat, spec.q - 2.0);
  } else {
    t.a_hat = 0.5 * spec.exp_a;
    t.mu_star = t.a_hat / std::pow(M_hat * std::pow(spec.radius_R, spec.dimension - 2.0), spec.q);
    t.Lambda_star_exp = t.k * t.C;
    t.mu_hat_star = t.a_hat / std::pow(M_hat, spec.q);
  }
  return t;
}

ChainInputs chain_inputs(const ProblemSpec& spec, const SampleProbe& probe) {
  return {spec, moser_context(spec, probe), ar_defect_constant(spec, probe)};
}

Chain constant_chain(const ChainInputs& in, double d) {
  Chain c;
  c.bounds = energy_bounds(in.spec, d, in.moser.alpha, in.moser.omega_measure, in.moser.S, in.C_ar);
  c.moser_hat = moser_constants(in.spec, c.bounds.hat_C, in.moser);
  c.thr = thresholds(in.spec, c.bounds, c.moser_hat.M);
  return c;
}

// ---------------------------------------------------------------------------

std::vector<DiscreteRadialFunction> shell_bumps(const RadialGrid& grid, double r0, int l) {
  if (l < 1) throw PreconditionError("multi_bump_D_l: l must be >= 1");
  const double w = r0 / l;
  if (w < 4.0 * grid.h())
    throw PreconditionError("multi_bump_D_l: shells of width " + std::to_string(w) + " span fewer than 4 cells");
  std::vector<DiscreteRadialFunction> out;
  out.push_back(default_bump(grid, w));
  for (int i = 1; i < l; ++i) {
    const double mid = (i + 0.5) * w, half = 0.5 * w;
    out.push_back(DiscreteRadialFunction::sample(grid, [=](double r) {
      const double x = (r - mid) / half;
      if (std::abs(x) >= 1.0 - 1e-12) return 0.0;  // shared edge nodes stay zero despite rounding
      return (1.0 - x * x) * (1.0 - x * x);
    }));
  }
  return out;
}

MultiBump multi_bump_D_l(const ChainInputs& in, int l, const RadialGrid& grid, const GrowthFloor& floor) {
  MultiBump mb;
  mb.bumps = shell_bumps(grid, in.spec.r0, l);
  mb.D_l = 0.0;
  for (const auto& b : mb.bumps) {
    mb.d.push_back(compute_d(in.spec, b, floor.c1, floor.c2).d);
    mb.D_l = std::max(mb.D_l, mb.d.back());
  }
  mb.lambda_star_l = constant_chain(in, mb.D_l).thr.lambda_star;
  return mb;
}

// ---------------------------------------------------------------------------

namespace {

// log of (sum |v_i|^e w_i)^{1/e}, -inf for v = 0
double log_lp(std::span<const double> v, std::span<const double> w, double e) {
  double top = 0.0;
  for (double x : v) top = std::max(top, x);
  if (top == 0.0) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s += std::pow(v[i] / top, e) * w[i];
  return std::log(top) + std::log(s) / e;
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

MoserChain moser_diagnostic(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u,
                            int j_max, const MoserContext& ctx) {
  if (j_max < 1 || j_max > 5) throw PreconditionError("moser_diagnostic: j_max must be in 1..5");
  const double two_star = critical_exponent(spec.dimension);
  const MoserConstants m = moser_constants(spec, lp_norm(grid, u, two_star), ctx);
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, std::abs(u[i]) - spec.a2);
  const auto w = grid.weights();
  const double log_front = std::log(m.a3 + m.a4) - std::log(ctx.S);
  const double log_cap = std::log(1e300);

  MoserChain chain;
  for (int j = 1; j <= j_max; ++j) {
    const double sj = std::pow(m.sigma, j);
    const double L_prev = log_lp(v, w, two_star * std::pow(m.sigma, j - 1));
    const double L_cur = log_lp(v, w, two_star * sj);
    if (L_prev > log_cap || L_cur > log_cap) {
      chain.truncated = true;
      chain.note = "norm above 1e300 at j = " + std::to_string(j) + "; chain truncated";
      break;
    }
    MoserStep st;
    st.j = j;
    st.log_lhs = 2.0 * sj * L_cur;
    st.log_rhs = 2.0 * j * std::log(m.sigma) + log_front + log_add(2.0 * sj * L_prev, (2.0 * sj - 1.0) * L_prev);
    if (st.log_lhs == -kInf) {
      st.ratio = kInf;
      st.pass = true;
    } else {
      st.ratio = std::exp(st.log_rhs - st.log_lhs);
      st.pass = st.log_rhs - st.log_lhs >= std::log1p(-1e-6);
    }
    chain.pass = chain.pass && st.pass;
    chain.steps.push_back(st);
  }
  return chain;
}

// ---------------------------------------------------------------------------

std::string sweep_trend(const std::vector<double>& ratios) {
  const std::size_t n = ratios.size();
  if (n < 2) return "bounded";
  const std::size_t from = n / 2 > 0 && n - n / 2 >= 2 ? n / 2 : 0;
  for (std::size_t j = from + 1; j < n; ++j)
    if (!(ratios[j] > ratios[j - 1])) return "bounded";
  return "unbounded";
}

SweepReport sweep_check(const std::vector<SweepPair>& pairs, const ChainInputs& in, double d, double D_l) {
  SweepReport rep;
  rep.entries.resize(pairs.size());
  const double beta = in.spec.decay_exponent();
  std::vector<std::string> errors(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(pairs.size()); ++j) {
    try {
      ChainInputs local = in;
      local.spec.radius_R = pairs[j].R;
      if (local.spec.s0 > 0.0) local.C_ar = ar_defect_constant(local.spec);
      SweepEntry& e = rep.entries[j];
      e.R = pairs[j].R;
      e.Lambda = pairs[j].Lambda;
      e.ratio = e.Lambda / std::pow(e.R, beta);
      e.lambda_star = constant_chain(local, d).thr.lambda_star;
      e.meets = e.Lambda >= e.lambda_star;
      if (!std::isnan(D_l)) {
        e.lambda_star_l = constant_chain(local, D_l).thr.lambda_star;
        e.meets_l = e.Lambda >= e.lambda_star_l;
      }
    } catch (const std::exception& ex) {
      errors[j] = ex.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw SolverError("sweep_check: " + e);
  std::vector<double> ratios;
  for (const auto& e : rep.entries) ratios.push_back(e.ratio);
  rep.trend = sweep_trend(ratios);
  return rep;
}

}  // namespace mpcert
