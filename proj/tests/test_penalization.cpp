#include <doctest.h>

#include <random>
#include <vector>

#include "fixtures.hpp"
#include "mpcert/penalization.hpp"

using namespace mpcert;
using doctest::Approx;

namespace {

ProblemSpec unit_V(double R = 1.0) {
  ProblemSpec s = fixture::p1(1.0, R, 0.5);
  s.potential.family = PotentialFamily::constant;
  s.potential.amplitude = 1.0;
  return s;
}

}  // namespace

TEST_SUITE("penalization") {

TEST_CASE("k from theta") {
  ProblemSpec s = unit_V();
  CHECK(make_penalized(s).k() == 6.0);
  s.theta = 4.0;
  CHECK(make_penalized(s).k() == 4.0);
  s.theta = 6.0;
  CHECK(make_penalized(s).k() == 3.0);
  s.theta = 2.0;
  CHECK_THROWS_AS(make_penalized(s), DomainError);
}

TEST_CASE("f_tilde branches") {
  ProblemSpec s = unit_V();
  const auto pen = make_penalized(s);
  CHECK(pen.f_tilde(2.0, 0.1) == Approx(0.01).epsilon(1e-15));
  CHECK(pen.f_tilde(2.0, 1.0) == Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(pen.f_tilde(2.0, -1.0) == 0.0);
  s.nonlinearity.c2 = -1.0;
  s.nonlinearity.gamma2 = 5.0;
  const auto pen2 = make_penalized(s);
  CHECK(pen2.f_tilde(2.0, 1.2) == Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("ties go to the middle branch") {
  // k s^2 = V s exactly at s = V/k; with V = 6 and k = 6 that is s = 1
  ProblemSpec s = unit_V();
  s.potential.amplitude = 6.0;
  const auto pen = make_penalized(s);
  CHECK(pen.f_tilde(2.0, 1.0) == 1.0);
}

TEST_CASE("g splices f and f_tilde") {
  ProblemSpec s = unit_V();
  const auto pen = make_penalized(s);
  const Nonlinearity f = s.f();
  for (double x : {-2.0, 0.3, 1.0, 50.0}) CHECK(pen.g(0.5, x) == f(0.5, x));
  CHECK(pen.g(2.0, 1.0) == Approx(1.0 / 6.0));
  s.odd = true;
  const auto odd = make_penalized(s);
  CHECK(odd.g(2.0, -1.0) == Approx(-1.0 / 6.0));
  CHECK(pen.g(2.0, 1.0, 1.0) == pen.g(2.0, 1.0));
}

TEST_CASE("G examples") {
  ProblemSpec s = unit_V();
  const auto pen = make_penalized(s);
  CHECK(pen.G(2.0, 1.0) == Approx(1.0 / 648.0 + 35.0 / 432.0).epsilon(1e-13));
  CHECK(pen.G(2.0, 0.0) == 0.0);
  CHECK(pen.G(0.5, 0.0) == 0.0);
  CHECK(pen.G(0.5, 1.0) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(pen.G(2.0, -1.0) == 0.0);
  CHECK(pen.G_node(7, 2.0, 1.0) == Approx(pen.G(2.0, 1.0)).epsilon(1e-15));
  CHECK(pen.G_node(7, 2.0, 1.0) == pen.G_node(7, 2.0, 1.0));
}

TEST_CASE("a node on |x| = R takes the mean of both sides") {
  ProblemSpec s = unit_V();
  const auto pen = make_penalized(s);
  const double R = s.radius_R;
  CHECK(pen.on_interface(R));
  CHECK_FALSE(pen.on_interface(R * (1.0 + 1e-9)));
  const double above = std::nextafter(R, 2.0 * R);
  for (double x : {0.05, 1.0, 3.0}) {
    CHECK(pen.g_node(R, 1.0, x) == Approx(0.5 * (s.f()(R, x) + pen.f_tilde(R, x))).epsilon(1e-15));
    CHECK(pen.G_node(3, R, 1.0, x) == Approx(0.5 * (s.f().primitive(R, x) + pen.G(above, x))).epsilon(1e-12));
    CHECK(pen.g_node(2.0, 1.0, x) == pen.g(2.0, 1.0, x));
  }
  CHECK(pen.g(R, 3.0) == s.f()(R, 3.0));
}

TEST_CASE("dG/ds = g away from crossings") {
  ProblemSpec s = fixture::p1(2.0);
  s.nonlinearity.c2 = -0.3;
  s.nonlinearity.gamma2 = 4.0;
  s.odd = true;
  const auto pen = make_penalized(s);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> R(0.0, 6.0), S(-4.0, 4.0);
  int tested = 0;
  for (int n = 0; n < 400; ++n) {
    const double r = R(rng), x = S(rng), h = 1e-6 * std::max(1.0, std::abs(x));
    const double g = pen.g(r, x);
    // skip samples whose stencil straddles a branch change
    if (std::abs(pen.g(r, x + h) - g) > 10.0 * h * (1.0 + std::abs(g)) ||
        std::abs(pen.g(r, x - h) - g) > 10.0 * h * (1.0 + std::abs(g)))
      continue;
    const double fd = (pen.G(r, x + h) - pen.G(r, x - h)) / (2.0 * h);
    if (std::abs(g) < 1e-6) continue;
    CHECK(std::abs(fd - g) <= 1e-6 * std::abs(g));
    ++tested;
  }
  CHECK(tested > 200);
}

TEST_CASE("clamp properties over random families") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int fam = 0; fam < 20; ++fam) {
    ProblemSpec s = fixture::p1(0.5 + 10.0 * U(rng), 0.5 + 3.0 * U(rng), 0.25);
    s.theta = 2.2 + 3.0 * U(rng);
    s.odd = fam % 2 == 1;
    s.nonlinearity.c1 = 0.1 + 2.0 * U(rng);
    s.nonlinearity.gamma1 = 2.5 + 2.0 * U(rng);
    s.nonlinearity.c2 = U(rng) - 0.5;
    s.nonlinearity.gamma2 = 3.0 + 2.0 * U(rng);
    s.nonlinearity.modulation = U(rng);
    const auto pen = make_penalized(s);
    const Potential V = s.V();
    const Nonlinearity f = s.f();
    const double k = pen.k();
    for (int n = 0; n < 100; ++n) {
      const double r = 6.0 * U(rng);
      const double x = (U(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, -4.0 + 6.0 * U(rng));
      const double g = pen.g(r, x), fx = f(r, x);
      CHECK(std::abs(g) <= std::abs(fx));
      if (r <= s.radius_R) {
        CHECK(g == fx);
      } else {
        CHECK(std::abs(g) <= V(r) * std::abs(x) / k * (1.0 + 1e-8));
        CHECK(pen.G(r, x) <= V(r) * x * x / (2.0 * k) * (1.0 + 1e-8));
      }
      if (s.odd) {
        CHECK(std::abs(g + pen.g(r, -x)) <= 1e-12 * std::max(1.0, std::abs(g)));
        CHECK(pen.G(r, -x) == Approx(pen.G(r, x)).epsilon(1e-12));
      } else if (x < 0.0) {
        CHECK(g == 0.0);
      }
    }
  }
}

TEST_CASE("node cache is safe under concurrent use") {
  ProblemSpec s = fixture::p1(3.0);
  const auto pen = make_penalized(s);
  const std::size_t n = 2000;
  pen.reserve_nodes(n / 2);  // half of the nodes go to the overflow map
  std::vector<double> ref(n), got(n);
  for (std::size_t i = 0; i < n; ++i) ref[i] = pen.G(1.01 + 0.004 * i, 0.01 + 0.001 * i);
#pragma omp parallel for
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(4 * n); ++j) {
    const std::size_t i = static_cast<std::size_t>(j) % n;
    const double v = pen.G_node(i, 1.01 + 0.004 * i, 0.01 + 0.001 * i);
    if (j < static_cast<std::ptrdiff_t>(n)) got[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == Approx(ref[i]).epsilon(1e-14));
  CHECK(pen.fallback_count() == 0);
}

}  // TEST_SUITE
