#include <doctest.h>

#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "mpcert/hypotheses.hpp"
#include "oracles.hpp"

using namespace mpcert;
using doctest::Approx;

TEST_SUITE("problem_model") {

TEST_CASE("sobolev constant: closed form against the instanton quotient") {
  CHECK(sobolev_constant(3) == Approx(3.0 * std::pow(std::numbers::pi / 2.0, 4.0 / 3.0)).epsilon(1e-14));
  CHECK(sobolev_constant(4) == Approx(8.0 * std::numbers::pi / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(sobolev_constant(5) == Approx(14.8).epsilon(0.005));
  for (int N : {3, 4, 5, 6}) {
    const double q = oracle::instanton_quotient(N, 10000, 100.0);
    CHECK(std::abs(sobolev_constant(N) / q - 1.0) < 1e-2);
    CHECK(sobolev_constant(N) == Approx(oracle::talenti(N)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(sobolev_constant(2), DomainError);
}

TEST_CASE("sphere area and ball volume") {
  CHECK(sphere_area(3) == Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_area(4) == Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  for (int N = 3; N <= 7; ++N) CHECK(ball_volume(N, 1.7) == Approx(oracle::ball_volume(N, 1.7)).epsilon(1e-14));
}

TEST_CASE("potential families") {
  PotentialParams P;
  P.family = PotentialFamily::well_decay;
  P.amplitude = 2.0;
  P.gamma = 1.5;
  P.depth = 3.0;
  P.width = 2.0;
  const Potential V(P);
  CHECK(V(0.0) == Approx(2.0 - 3.0));
  CHECK(V(1.0) == Approx(2.0 * std::pow(2.0, -1.5) - 3.0 * 0.75));
  CHECK(V(3.0) == Approx(2.0 * std::pow(4.0, -1.5)));
  CHECK(potential_family_from_string("quadratic") == PotentialFamily::quadratic);
  CHECK_THROWS_AS(potential_family_from_string("bogus"), DomainError);
  for (auto f : {PotentialFamily::constant, PotentialFamily::inverse_power, PotentialFamily::well_decay,
                 PotentialFamily::exp_decay, PotentialFamily::quadratic})
    CHECK(potential_family_from_string(to_string(f)) == f);
}

TEST_CASE("nonlinearity primitive matches quadrature; odd reflection") {
  NonlinearityParams P;
  P.c1 = 1.5;
  P.gamma1 = 3.3;
  P.c2 = -0.2;
  P.gamma2 = 4.5;
  P.modulation = 0.7;
  for (bool odd : {false, true}) {
    const Nonlinearity f(P, odd);
    for (double r : {0.0, 0.5, 3.0})
      for (double s : {0.3, 1.0, 2.5}) {
        const double q = oracle::trapezoid([&](double t) { return f(r, t); }, 0.0, s, 20000);
        CHECK(f.primitive(r, s) == Approx(q).epsilon(1e-7));
        if (odd) {
          CHECK(f(r, -s) == -f(r, s));
          CHECK(f.primitive(r, -s) == f.primitive(r, s));
        } else {
          CHECK(f(r, -s) == 0.0);
          CHECK(f.primitive(r, -s) == 0.0);
        }
      }
  }
  NonlinearityParams E;
  E.family = NonlinearityFamily::exponential;
  const Nonlinearity g(E, false);
  for (double s : {0.2, 1.0, 4.0}) {
    CHECK(g(0.0, s) == Approx(s * s * std::exp(-1.0 / s)));
    const double q = oracle::trapezoid([&](double t) { return g(0.0, t); }, 0.0, s, 20000);
    CHECK(g.primitive(0.0, s) == Approx(q).epsilon(1e-7));
  }
}

TEST_CASE("validate names the offending field") {
  ProblemSpec s = fixture::p1();
  CHECK_NOTHROW(s.validate());
  s.p = 7.0;
  try {
    s.validate();
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("problem.p") != std::string::npos);
  }
  s = fixture::p1();
  s.r0 = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = fixture::p1();
  s.theta = 2.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = fixture::p1();
  s.dimension = 2;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("omega_stats examples") {
  const SampleProbe probe;
  {
    const OmegaStats om = omega_stats(fixture::p1(), probe);
    CHECK(om.omega_measure == 0.0);
    CHECK(om.alpha == 0.0);
  }
  {
    ProblemSpec s = fixture::p1();
    s.potential.family = PotentialFamily::quadratic;
    s.potential.c2 = 1.0;
    s.potential.c0 = 1.0;
    const OmegaStats om = omega_stats(s, probe);
    CHECK(om.omega_measure == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-8));
    CHECK(om.alpha == Approx(1.0).epsilon(1e-12));
    CHECK(om.bounded);
  }
  {
    ProblemSpec s = fixture::p1();
    s.potential.family = PotentialFamily::constant;
    s.potential.amplitude = -1.0;
    const OmegaStats om = omega_stats(s, probe);
    CHECK_FALSE(om.bounded);
    const HypothesisReport rep = check_hypotheses(s, probe, CheckMode::standard);
    CHECK_FALSE(rep.v1_ok);
  }
}

TEST_CASE("check_hypotheses on the prototype") {
  const double lambda = 7.0;
  const HypothesisReport rep = check_hypotheses(fixture::p1(lambda), SampleProbe{}, CheckMode::standard);
  CHECK(rep.f1_ok);
  CHECK(rep.f1_bound == Approx(1.0).epsilon(1e-10));
  CHECK(rep.f2_ok);
  CHECK(rep.f3_ok);
  CHECK(rep.v1_ok);
  CHECK(rep.v1_margin == kInf);
  CHECK(rep.v1_case == V1Case::nonnegative_with_well);
  CHECK(rep.v2_inf == Approx(lambda / 2.0).epsilon(1e-10));
  CHECK(rep.all_ok());
  CHECK(rep.failures().empty());
}

TEST_CASE("v2_inf non-decreasing in R when r V(r) increases") {
  double prev = 0.0;
  for (double R : {1.0, 1.5, 2.0, 4.0, 8.0}) {
    const double v = check_hypotheses(fixture::p1(1.0, R, 0.5), SampleProbe{}, CheckMode::standard).v2_inf;
    CHECK(v >= prev);
    CHECK(v == Approx(R / (1.0 + R)).epsilon(1e-10));
    prev = v;
  }
}

TEST_CASE("(f3) failure carries a witness") {
  ProblemSpec s = fixture::p1();
  s.nonlinearity.c2 = -1.0;
  s.nonlinearity.gamma2 = 5.0;  // f = s^2 - s^4
  const HypothesisReport rep = check_hypotheses(s, SampleProbe{}, CheckMode::standard);
  CHECK_FALSE(rep.f3_ok);
  REQUIRE(rep.f3_witness.has_value());
  const double x = rep.f3_witness->second;
  const Nonlinearity f = s.f();
  CHECK(x * f(0.0, x) < 3.0 * f.primitive(0.0, x));
}

TEST_CASE("exponential mode: f-hat bound finite") {
  ProblemSpec s = fixture::p1();
  s.mode = Mode::exponential;
  s.q = 1.0;
  s.nonlinearity.family = NonlinearityFamily::exponential;
  s.exp_a = 1.0;
  const HypothesisReport rep = check_hypotheses(s, SampleProbe{}, CheckMode::exponential);
  CHECK(rep.f_hat1_ok);
  CHECK(std::isfinite(rep.f_hat1_bound));
}

TEST_CASE("growth constant near zero") {
  ProblemSpec s = fixture::p1();
  CHECK(growth_constant_near_zero(s, 10.0) == Approx(1.0).epsilon(1e-12));
  s.nonlinearity.c2 = 1.0;
  s.nonlinearity.gamma2 = 5.0;  // s^2 + s^4
  CHECK(growth_constant_near_zero(s, 2.0) == Approx(5.0).epsilon(1e-10));
  double prev = 0.0;
  for (double cap : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const double c = growth_constant_near_zero(s, cap);
    CHECK(c >= prev);
    prev = c;
  }
  s = fixture::p1();
  s.nonlinearity.gamma1 = 2.5;  // s^{3/2}
  CHECK_THROWS_AS(growth_constant_near_zero(s, 1.0), HypothesisViolation);
}

TEST_CASE("ar defect constant") {
  ProblemSpec s = fixture::p1();
  CHECK(ar_defect_constant(s) == 0.0);
  s.s0 = 1.0;
  CHECK(ar_defect_constant(s) == Approx(0.0).epsilon(1e-12));  // s f - 3F = 0
  // f = s^2 - s: F - s f/3 = s^3/3 - s^2/2 - (s^3 - s^2)/3 = -s^2/6 <= 0
  s.nonlinearity.c2 = -1.0;
  s.nonlinearity.gamma2 = 2.0;
  CHECK(ar_defect_constant(s) == Approx(0.0).epsilon(1e-12));
  // f = s^2 + 1 on s > 0: F - s f/3 = s - s/3 = 2s/3, sup over [0, S0(1+delta)]
  s.nonlinearity.c2 = 1.0;
  s.nonlinearity.gamma2 = 1.0;
  const double c = ar_defect_constant(s);
  CHECK(c >= 2.0 / 3.0);
  CHECK(c <= 2.0 / 3.0 * 1.1);
}

TEST_CASE("check_hypotheses is deterministic") {
  const ProblemSpec s = fixture::p1(3.0);
  const auto a = check_hypotheses(s, SampleProbe{}, CheckMode::standard);
  const auto b = check_hypotheses(s, SampleProbe{}, CheckMode::standard);
  CHECK(a.f1_bound == b.f1_bound);
  CHECK(a.f2_margin == b.f2_margin);
  CHECK(a.v2_inf == b.v2_inf);
}

}  // TEST_SUITE
