#include "mpcert/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace mpcert {

DiscreteRadialFunction default_bump(const RadialGrid& grid, double r0) {
  if (!(r0 > 0.0)) throw DomainError("default_bump: r0 must be > 0");
  return DiscreteRadialFunction::sample(grid, [r0](double r) {
    if (r >= r0 * (1.0 - 1e-12)) return 0.0;
    const double x = 1.0 - (r / r0) * (r / r0);
    return x * x;
  });
}

DiscreteRadialFunction find_endpoint_e(const DiscreteProblem& problem, const DiscreteRadialFunction& bump) {
  double top = 0.0;
  for (double v : bump.values()) {
    if (v < 0.0) throw PreconditionError("find_endpoint_e: bump must be nonnegative");
    top = std::max(top, v);
  }
  if (top == 0.0) throw PreconditionError("find_endpoint_e: bump is identically zero");
  double t = 1.0;
  for (int doubling = 0; doubling <= 60; ++doubling, t *= 2.0) {
    DiscreteRadialFunction e = t * bump;
    if (problem.J(e) < 0.0) return e;
  }
  throw HypothesisViolation("(f3)", "superlinearity not visible at this resolution: J(t bump) >= 0 after 60 doublings");
}

DiscreteRadialFunction find_endpoint_e(const RadialGrid& grid, const PenalizedNonlinearity& pen,
                                       const ProblemSpec& spec, const DiscreteRadialFunction& bump) {
  return find_endpoint_e(DiscreteProblem(grid, spec, pen), bump);
}

// ---------------------------------------------------------------------------

namespace {

// portable uniform and normal draws from a 64-bit engine
double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
double normal01(std::mt19937_64& g) {
  const double u1 = (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

BetaRho estimate_beta_rho(const DiscreteProblem& problem, int trial_count, std::uint64_t seed,
                          std::span<const DiscreteRadialFunction> extra) {
  if (trial_count < 8) throw PreconditionError("estimate_beta_rho: trial_count must be >= 8");
  const RadialGrid& grid = problem.grid();
  std::mt19937_64 gen(seed);
  const double Rm = grid.r_max();
  const double lmin = std::log(4.0 * grid.h()), lmax = std::log(0.5 * Rm);

  std::vector<DiscreteRadialFunction> dirs;
  for (int t = 0; t < trial_count; ++t) {
    double amp[6], len[6];
    for (int k = 0; k < 6; ++k) {
      amp[k] = normal01(gen);
      len[k] = std::exp(lmin + (lmax - lmin) * uniform01(gen));
    }
    DiscreteRadialFunction v = DiscreteRadialFunction::sample(grid, [&](double r) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += amp[k] * std::exp(-(r / len[k]) * (r / len[k]));
      return s * (1.0 - (r / Rm) * (r / Rm));
    });
    dirs.push_back(std::move(v));
  }
  for (const auto& v : extra) dirs.push_back(v);
  for (auto& v : dirs) {
    const double n2 = problem.norm_E_sq(v);
    if (n2 > 0.0) v *= 1.0 / std::sqrt(n2);
  }

  BetaRho out;
  constexpr int ladder = 31;
  double best = 0.0;
  for (int j = 0; j < ladder; ++j) {
    const double rho = std::pow(10.0, -3.0 + 3.0 * j / (ladder - 1));
    double floor = kInf;
    for (const auto& v : dirs) {
      if (!(problem.norm_E_sq(v) > 0.0)) continue;
      floor = std::min(floor, problem.J(rho * v));
    }
    if (floor > best) {
      best = floor;
      out.beta = floor;
      out.rho = rho;
      out.found = true;
    }
  }
  if (!out.found) out.warning = "no radius in [1e-3, 1] gave a positive energy floor";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// best point found on one segment of the path
struct SegmentMax {
  double value = -kInf;
  std::size_t seg = 0;  // segment [seg, seg+1]
  double t = 0.0;       // position inside it
};

// The path together with J and dJ at every vertex. Only one vertex changes
// per iteration, so the residual vectors are cached.
class Path {
 public:
  Path(const DiscreteProblem& p, std::vector<DiscreteRadialFunction> vertices)
      : P(p), M(static_cast<std::size_t>(p.grid().cells())), z(std::move(vertices)) {
    J.resize(z.size());
    rho.assign(z.size(), std::vector<double>(M));
    for (std::size_t j = 0; j < z.size(); ++j) {
      J[j] = P.J(z[j]);
      P.rho(z[j], rho[j]);
    }
  }

  std::size_t m() const { return z.size() - 1; }

  void insert(std::size_t j, const DiscreteRadialFunction& y) {
    z.insert(z.begin() + static_cast<std::ptrdiff_t>(j), y);
    J.insert(J.begin() + static_cast<std::ptrdiff_t>(j), P.J(y));
    rho.insert(rho.begin() + static_cast<std::ptrdiff_t>(j), std::vector<double>(M));
    P.rho(y, rho[j]);
  }

  void set(std::size_t j, DiscreteRadialFunction y) {
    z[j] = std::move(y);
    J[j] = P.J(z[j]);
    P.rho(z[j], rho[j]);
  }

  DiscreteRadialFunction point(std::size_t seg, double t) const {
    if (t == 0.0) return z[seg];
    DiscreteRadialFunction y = z[seg];
    y *= 1.0 - t;
    y.axpy(t, z[seg + 1]);
    return y;
  }

  // max of J on segment j: endpoints, or the interior root of phi' when
  // phi'(0) > 0 > phi'(1)
  SegmentMax segment_max(std::size_t j) const {
    SegmentMax out;
    out.seg = j;
    if (J[j] >= J[j + 1]) {
      out.value = J[j];
      out.t = 0.0;
    } else {
      out.value = J[j + 1];
      out.t = 1.0;
    }
    const DiscreteRadialFunction d = z[j + 1] - z[j];
    const auto dv = d.values().first(M);
    const double s0 = P.dot(rho[j], dv);
    const double s1 = P.dot(rho[j + 1], dv);
    if (!(s0 > 0.0 && s1 < 0.0)) return out;
    std::vector<double> buf(M);
    auto dphi = [&](double t) {
      P.rho(point(j, t), buf);
      return P.dot(buf, dv);
    };
    std::uintmax_t iters = 80;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
    const auto [a, b] = boost::math::tools::toms748_solve(dphi, 0.0, 1.0, s0, s1, tol, iters);
    const double t = 0.5 * (a + b);
    const double v = P.J(point(j, t));
    if (v > out.value) {
      out.value = v;
      out.t = t;
    }
    return out;
  }

  SegmentMax path_max() const {
    SegmentMax best;
    for (std::size_t j = 0; j < m(); ++j) {
      const SegmentMax s = segment_max(j);
      if (s.value > best.value) best = s;
    }
    return best;
  }

  const DiscreteProblem& P;
  std::size_t M;
  std::vector<DiscreteRadialFunction> z;
  std::vector<double> J;
  std::vector<std::vector<double>> rho;
};

// equal arc length in the energy norm; endpoints copied
std::vector<DiscreteRadialFunction> redistribute(const DiscreteProblem& P, const std::vector<DiscreteRadialFunction>& z,
                                                 std::size_t m) {
  const std::size_t n = z.size() - 1;
  std::vector<double> s(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) s[j] = s[j - 1] + std::sqrt(std::max(0.0, P.norm_E_sq(z[j] - z[j - 1])));
  std::vector<DiscreteRadialFunction> out;
  out.reserve(m + 1);
  out.push_back(z.front());
  std::size_t k = 1;
  for (std::size_t j = 1; j < m; ++j) {
    const double target = s[n] * j / m;
    while (k < n && s[k] < target) ++k;
    const double span = s[k] - s[k - 1];
    const double t = span > 0.0 ? (target - s[k - 1]) / span : 0.0;
    DiscreteRadialFunction y = z[k - 1];
    y *= 1.0 - t;
    y.axpy(t, z[k]);
    out.push_back(std::move(y));
  }
  out.push_back(z.back());
  return out;
}

}  // namespace

SolveResult mpa_solve(const DiscreteProblem& problem, const DiscreteRadialFunction& e, const MpaOptions& opts) {
  if (opts.m < 8) throw PreconditionError("mpa_solve: path needs m >= 8");
  const double Je = problem.J(e);
  if (!(Je < 0.0)) throw PreconditionError("mpa_solve: J(e) = " + std::to_string(Je) + " is not below zero");

  const std::size_t m = static_cast<std::size_t>(opts.m);
  std::vector<DiscreteRadialFunction> z0;
  for (std::size_t j = 0; j <= m; ++j) z0.push_back((static_cast<double>(j) / m) * e);
  Path path(problem, std::move(z0));
  SolveResult res(problem.grid());
  const double slack = 1e-12;

  SegmentMax top = path.path_max();
  for (int it = 0; it < opts.max_iter; ++it) {
    const double vmax = top.value;
    res.path_max_history.push_back(vmax);
    res.iterations = it + 1;

    DiscreteRadialFunction y0 = path.point(top.seg, top.t);
    const Gradient g = problem.grad(y0);
    const double unorm = std::sqrt(std::max(0.0, problem.norm_E_sq(y0)));
    res.u = y0;
    res.level = vmax;
    res.residual = g.residual;
    if (g.residual <= opts.tol * std::max(1.0, unorm)) {
      res.converged = true;
      break;
    }

    // an interior maximiser becomes a vertex of its own, so the polygon is
    // geometrically unchanged before the move
    std::size_t i = top.t >= 1.0 ? top.seg + 1 : top.seg;
    if (top.t > 0.0 && top.t < 1.0) {
      i = top.seg + 1;
      path.insert(i, y0);
    }
    if (i == 0 || i == path.m()) {
      res.diagnostic = "path maximum sits at an endpoint";
      break;
    }

    const double res2 = g.residual * g.residual;
    const double noise = 1e-14 * std::max(1.0, std::abs(vmax));
    auto P_dot = [&](const std::vector<double>& r, const Gradient& gr) {
      return problem.dot(r, gr.direction.values().first(path.M));
    };
    bool moved = false;
    DiscreteRadialFunction old = path.z[i];
    const double oldJ = path.J[i];
    const std::vector<double> old_rho = path.rho[i];
    for (double lam = opts.step; lam >= opts.step_floor; lam *= 0.5) {
      DiscreteRadialFunction y = y0;
      y.axpy(-lam, g.direction);
      const double Jy = problem.J(y);
      const bool armijo = Jy <= vmax - opts.armijo_c1 * lam * res2;
      // near convergence the decrease drowns in rounding of J; then accept on
      // the slope instead (approximate Wolfe) if J did not visibly rise
      const bool noisy = !armijo && Jy <= vmax + noise;
      if (!armijo && !noisy) continue;
      path.set(i, std::move(y));
      if (noisy && !(P_dot(path.rho[i], g) >= -(1.0 - 2.0 * opts.armijo_c1) * res2)) {
        path.z[i] = old;
        path.J[i] = oldJ;
        path.rho[i] = old_rho;
        continue;
      }
      // the two touched segments must stay below vmax
      const double local = std::max(path.segment_max(i - 1).value, path.segment_max(i).value);
      if (local <= vmax + slack * std::max(1.0, std::abs(vmax))) {
        moved = true;
        break;
      }
      path.z[i] = old;
      path.J[i] = oldJ;
      path.rho[i] = old_rho;
    }
    if (!moved) {
      res.diagnostic = "line search reached the step floor at iteration " + std::to_string(it);
      break;
    }

    if (opts.redistribute_every > 0 && (it + 1) % opts.redistribute_every == 0) {
      const SegmentMax before = path.path_max();
      Path trial(problem, redistribute(problem, path.z, m));
      const SegmentMax after = trial.path_max();
      if (after.value <= before.value) {
        path.z = std::move(trial.z);
        path.J = std::move(trial.J);
        path.rho = std::move(trial.rho);
      }
    }

    const SegmentMax next = path.path_max();
    if (next.value > vmax + slack * std::max(1.0, std::abs(vmax)))
      throw SolverError("mpa_solve: path maximum increased from " + std::to_string(vmax) + " to " +
                        std::to_string(next.value));
    top = next;
  }
  if (!res.converged && res.diagnostic.empty())
    res.diagnostic = "max_iter reached with residual " + std::to_string(res.residual);

  if (!problem.pen().odd()) {
    double umin = 0.0;
    for (double v : res.u.values()) umin = std::min(umin, v);
    res.nonnegative = umin >= -1e-8;
    if (!res.nonnegative) {
      if (!res.diagnostic.empty()) res.diagnostic += "; ";
      res.diagnostic += "solution dips to " + std::to_string(umin) + " below zero";
    }
  }
  return res;
}
// ---------------------------------------------------------------------------

GrowthFloor choose_growth_floor(const ProblemSpec& spec) {
  const Nonlinearity f = spec.f();
  const double s1 = std::max(spec.s0, 1.0);
  constexpr int nr = 33, ns = 1024;
  GrowthFloor out{kInf, 0.0};
  for (int ir = 0; ir < nr; ++ir) {
    const double r = spec.r0 * ir / (nr - 1);
    out.c1 = std::min(out.c1, f.primitive(r, s1) / std::pow(s1, spec.theta));
  }
  if (!(out.c1 > 0.0)) throw HypothesisViolation("(f3)", "F(r, max(S0,1)) is not positive on the bump ball");
  double c2 = 0.0, best_r = 0.0, best_s = 0.0;
  for (int ir = 0; ir < nr; ++ir) {
    const double r = spec.r0 * ir / (nr - 1);
    for (int is = 1; is <= ns; ++is) {
      const double s = s1 * is / ns;
      const double gap = out.c1 * std::pow(s, spec.theta) - f.primitive(r, s);
      if (gap > c2) {
        c2 = gap;
        best_r = r;
        best_s = s;
      }
    }
  }
  if (c2 > 0.0) {
    const double ds = s1 / ns;
    auto neg_gap = [&](double s) { return f.primitive(best_r, s) - out.c1 * std::pow(s, spec.theta); };
    const auto [x, fx] = boost::math::tools::brent_find_minima(neg_gap, std::max(0.0, best_s - ds),
                                                               std::min(s1, best_s + ds), 52);
    c2 = std::max(c2, -fx);
  }
  out.c2 = c2;
  return out;
}

DBound d_from_integrals(double A, double B, double theta, double c2_times_ball) {
  if (!(A > 0.0) || !(B > 0.0) || !(theta > 2.0)) throw DomainError("compute_d: need A > 0, B > 0, theta > 2");
  DBound out;
  out.A = A;
  out.B = B;
  out.t_star = std::pow(A / (theta * B), 1.0 / (theta - 2.0));
  out.d = 0.5 * out.t_star * out.t_star * A - B * std::pow(out.t_star, theta) + c2_times_ball;
  return out;
}

DBound compute_d(const ProblemSpec& spec, const DiscreteRadialFunction& bump, double c1, double c2) {
  if (!(c1 > 0.0)) throw PreconditionError("compute_d: c1 must be > 0");
  if (!(c2 >= 0.0)) throw PreconditionError("compute_d: c2 must be >= 0");
  const RadialGrid& grid = bump.grid();
  const auto c = grid.edges();
  const auto w = grid.weights();
  const auto phi = bump.values();
  const double v_inf = spec.bump_ceiling();
  double grad2 = 0.0, mass = 0.0, theta_mass = 0.0, top = 0.0;
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    const double dphi = phi[i + 1] - phi[i];
    grad2 += c[i] * dphi * dphi;
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    mass += phi[i] * phi[i] * w[i];
    theta_mass += std::pow(std::abs(phi[i]), spec.theta) * w[i];
    top = std::max(top, std::abs(phi[i]));
  }
  const double ball = ball_volume(spec.dimension, spec.r0);
  DBound out = d_from_integrals(grad2 + v_inf * mass, c1 * theta_mass, spec.theta, c2 * ball);

  // (7) on B_{r0} x [0, s_max]
  const Nonlinearity f = spec.f();
  const double s_max = std::max(10.0, 2.0 * out.t_star * top);
  constexpr int nr = 17, ns = 400;
  for (int ir = 0; ir < nr; ++ir) {
    const double r = spec.r0 * ir / (nr - 1);
    for (int is = 0; is <= ns; ++is) {
      const double s = s_max * is / ns;
      const double lower = c1 * std::pow(s, spec.theta) - c2;
      const double F = f.primitive(r, s);
      if (F < lower - 1e-12 - 1e-8 * std::abs(lower))
        throw HypothesisViolation("(f3)/(f2)", "F(" + std::to_string(r) + ", " + std::to_string(s) + ") = " +
                                                   std::to_string(F) + " < C1 s^theta - C2 = " + std::to_string(lower));
    }
  }
  return out;
}

}  // namespace mpcert
