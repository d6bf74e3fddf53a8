// serial reference vs OpenMP kernels on the P1 problem
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mpcert/kernels.hpp"
#include "mpcert/penalization.hpp"
#include "mpcert/radial.hpp"

using namespace mpcert;

namespace {

struct Setup {
  explicit Setup(int M)
      : g(build_grid(3, 10.0, M)), pen(make_penalized(spec())), u(g.size()), Vv(g.size()), vw(g.size()),
        out(g.cells()) {
    const Potential V = spec().V();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.r(i);
      u[i] = 3.0 * std::exp(-r * r) * (1.0 - r / 10.0);
      Vv[i] = V(r);
      vw[i] = Vv[i] * g.weights()[i];
    }
  }
  static ProblemSpec spec() {
    ProblemSpec s;
    s.potential.family = PotentialFamily::inverse_power;
    s.lambda = 50.0;
    s.r0 = 0.95;
    return s;
  }
  kernels::EnergyInputs in() const { return {g.r(), g.weights(), g.edges(), vw, Vv}; }
  RadialGrid g;
  PenalizedNonlinearity pen;
  std::vector<double> u, Vv, vw, out;
};

template <bool Parallel>
void BM_dot(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? kernels::omp::dot(s.u, s.u) : kernels::serial::dot(s.u, s.u));
}

template <bool Parallel>
void BM_quadratic_form(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  const auto in = s.in();
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? kernels::omp::quadratic_form(in, s.u) : kernels::serial::quadratic_form(in, s.u));
}

template <bool Parallel>
void BM_primitive_sum(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  const auto in = s.in();
  s.pen.reserve_nodes(s.g.size());
  kernels::serial::primitive_sum(s.pen, in, s.u);  // the first pass fills the branch-cut cache
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? kernels::omp::primitive_sum(s.pen, in, s.u)
                                      : kernels::serial::primitive_sum(s.pen, in, s.u));
}

template <bool Parallel>
void BM_residual(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  const auto in = s.in();
  for (auto _ : st) {
    if (Parallel)
      kernels::omp::residual(s.pen, in, s.u, s.out);
    else
      kernels::serial::residual(s.pen, in, s.u, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
}

}  // namespace

#define BOTH(fn)                                                     \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->Arg(20000)->Arg(200000); \
  BENCHMARK(fn<true>)->Name(#fn "/omp")->Arg(20000)->Arg(200000)

BOTH(BM_dot);
BOTH(BM_quadratic_form);
BOTH(BM_primitive_sum);
BOTH(BM_residual);

BENCHMARK_MAIN();
