#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mpcert/mountain_pass.hpp"
#include "mpcert/shooting.hpp"
#include "oracles.hpp"

using namespace mpcert;
using doctest::Approx;

TEST_SUITE("mountain_pass") {

TEST_CASE("default bump") {
  const RadialGrid g = build_grid(3, 2.0, 200);
  const auto b = default_bump(g, 1.0);
  CHECK(b[0] == 1.0);
  CHECK(b[50] == Approx(std::pow(1.0 - 0.25, 2)));
  for (std::size_t i = 100; i < g.size(); ++i) CHECK(b[i] == 0.0);
}

TEST_CASE("d in closed form") {
  CHECK(d_from_integrals(1.0, 1.0, 3.0, 0.0).d == Approx(1.0 / 54.0).epsilon(1e-14));
  CHECK(d_from_integrals(1.0, 1.0, 3.0, 0.0).t_star == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d_from_integrals(2.0, 1.0, 4.0, 0.0).d == Approx(0.25).epsilon(1e-14));
  CHECK(d_from_integrals(2.0, 1.0, 4.0, 0.0).t_star == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(d_from_integrals(2.0, 1.0, 4.0, 0.3).d == Approx(0.25 + 0.3).epsilon(1e-14));
  for (double A : {0.3, 2.0, 17.0})
    for (double th : {2.5, 3.0, 5.0})
      CHECK(d_from_integrals(A, 0.7, th, 0.0).d == Approx(oracle::d_closed(A, 0.7, th, 0.0)).epsilon(1e-13));
}

TEST_CASE("compute_d on the prototype and its validation") {
  const ProblemSpec s = fixture::p1(1.0);
  const RadialGrid g = build_grid(3, 10.0, 2000);
  const GrowthFloor fl = choose_growth_floor(s);
  CHECK(fl.c1 > 0.0);
  CHECK(fl.c2 >= 0.0);
  // the floor holds where it was not sampled
  const Nonlinearity f = s.f();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const double r = s.r0 * U(rng), x = std::pow(10.0, -3.0 + 6.0 * U(rng));
    CHECK(f.primitive(r, x) >= fl.c1 * std::pow(x, s.theta) - fl.c2 - 1e-12 * std::pow(x, s.theta));
  }
  const DBound d = compute_d(s, default_bump(g, s.r0), fl.c1, fl.c2);
  CHECK(d.d > 0.0);
  CHECK(d.d == Approx(oracle::d_closed(d.A, d.B, s.theta, fl.c2 * oracle::ball_volume(3, s.r0))).epsilon(1e-12));
  CHECK_THROWS_AS(compute_d(s, default_bump(g, s.r0), 10.0 * fl.c1 + 1.0, 0.0), HypothesisViolation);
}

TEST_CASE("endpoint e") {
  const ProblemSpec s = fixture::p1(1.0);
  const RadialGrid g = build_grid(3, 10.0, 1000);
  const auto pen = make_penalized(s);
  const DiscreteProblem P(g, s, pen);
  const auto e = find_endpoint_e(P, default_bump(g, s.r0));
  CHECK(P.J(e) < 0.0);
  CHECK(P.J(0.5 * e) >= P.J(e));
  CHECK_THROWS_AS(find_endpoint_e(P, DiscreteRadialFunction(g)), PreconditionError);
}

TEST_CASE("endpoint doubling on a cubic bound") {
  // J(t phi) = t^2/2 A - B t^3 with A = B = 1 scaled: the doubling stops at t = 1
  const ProblemSpec s = fixture::p1(1.0);
  const RadialGrid g = build_grid(3, 10.0, 1000);
  const auto pen = make_penalized(s);
  const DiscreteProblem P(g, s, pen);
  auto phi = default_bump(g, s.r0);
  const double A = P.norm_E_sq(phi);
  double B = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) B += std::pow(phi[i], 3) / 3.0 * g.weights()[i];
  // scale phi so that A = B (both equal A^3/B^2)
  phi *= A / B;
  const auto e = find_endpoint_e(P, phi);
  CHECK(e[0] == Approx(phi[0]).epsilon(1e-15));
}

TEST_CASE("beta and rho") {
  const ProblemSpec s = fixture::p1(1.0);
  const RadialGrid g = build_grid(3, 10.0, 2000);
  const auto pen = make_penalized(s);
  const DiscreteProblem P(g, s, pen);
  const BetaRho br = estimate_beta_rho(P, 16, 42);
  CHECK(br.found);
  CHECK(br.beta > 0.0);
  CHECK(br.rho >= 1e-3);
  CHECK(br.rho <= 1.0);
  const BetaRho again = estimate_beta_rho(P, 16, 42);
  CHECK(again.beta == br.beta);

  ProblemSpec sq = s;
  sq.nonlinearity.gamma1 = 1.5;  // f = 10 sqrt(s+), subquadratic at 0
  sq.nonlinearity.c1 = 10.0;     // with c1 = 1 the unit sphere already sits above the dip
  const auto pq = make_penalized(sq);
  const DiscreteProblem Q(g, sq, pq);
  const BetaRho none = estimate_beta_rho(Q, 16, 42);
  CHECK_FALSE(none.found);
  CHECK_FALSE(none.warning.empty());
}

TEST_CASE("mpa_solve on the prototype") {
  const ProblemSpec s = fixture::p1(1.0);
  const RadialGrid g = build_grid(3, 10.0, 1000);
  const auto pen = make_penalized(s);
  const DiscreteProblem P(g, s, pen);
  CHECK_THROWS_AS(mpa_solve(P, default_bump(g, s.r0)), PreconditionError);
  const auto e = find_endpoint_e(P, default_bump(g, s.r0));
  const SolveResult res = mpa_solve(P, e);
  REQUIRE(res.converged);
  CHECK(res.level > 0.0);
  CHECK(res.level == Approx(P.J(res.u)).epsilon(1e-14));
  CHECK(res.residual <= 1e-8 * std::max(1.0, P.norm_E(res.u)));
  CHECK(res.nonnegative);
  for (std::size_t i = 1; i < res.path_max_history.size(); ++i)
    CHECK(res.path_max_history[i] <= res.path_max_history[i - 1] * (1.0 + 1e-12) + 1e-12);
  const BetaRho br = estimate_beta_rho(P, 16, 42);
  CHECK(res.level >= br.beta);
  const GrowthFloor fl = choose_growth_floor(s);
  CHECK(res.level <= compute_d(s, default_bump(g, s.r0), fl.c1, fl.c2).d * (1.0 + 1e-8));
}

TEST_CASE("shooting oracle") {
  ProblemSpec lin = fixture::sanity();
  lin.nonlinearity.c1 = 0.0;
  const RadialGrid g = build_grid(3, 20.0, 1000);
  CHECK_THROWS_AS(shooting_oracle(lin, g), OracleInconclusive);

  ProblemSpec mod = fixture::sanity();
  mod.nonlinearity.modulation = 0.5;
  CHECK_THROWS_AS(shooting_oracle(mod, g), PreconditionError);

  const ProblemSpec s = fixture::sanity();
  const ShootingResult a = shooting_oracle(s, g);
  const RadialGrid g2 = build_grid(3, 20.0, 2000);
  const ShootingResult b = shooting_oracle(s, g2);
  CHECK(a.u0 == Approx(4.19168295444153).epsilon(1e-9));
  CHECK(a.u0 == Approx(b.u0).epsilon(1e-12));
  double diff = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(a.profile[i] - b.profile[2 * i]));
  CHECK(diff < 1e-6 * a.u0);
}

}  // TEST_SUITE
