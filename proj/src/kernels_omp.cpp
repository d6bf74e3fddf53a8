#include <cmath>
#include <vector>

#include "mpcert/kernels.hpp"

namespace mpcert::kernels::omp {

namespace {

// block partials reduced in parallel, summed in index order
template <class Body>
double blocked_sum(std::size_t n, Body body) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += body(i);
    part[b] = s;
  }
  double total = 0.0;
  for (double p : part) total += p;
  return total;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double power_sum(std::span<const double> u, std::span<const double> w, double e) {
  return blocked_sum(u.size(), [&](std::size_t i) { return std::pow(std::abs(u[i]), e) * w[i]; });
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(u.size()); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double quadratic_form(const EnergyInputs& in, std::span<const double> u) {
  const std::size_t M = in.c.size();
  return blocked_sum(u.size(), [&](std::size_t i) {
    double s = in.vw[i] * u[i] * u[i];
    if (i < M) {
      const double d = u[i + 1] - u[i];
      s += in.c[i] * d * d;
    }
    return s;
  });
}

double primitive_sum(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u) {
  return blocked_sum(u.size(), [&](std::size_t i) { return pen.G_node(i, in.r[i], in.V[i], u[i]) * in.w[i]; });
}

void residual(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u,
              std::span<double> out) {
  const std::ptrdiff_t M = static_cast<std::ptrdiff_t>(in.c.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < M; ++i) {
    double a = in.vw[i] * u[i] + in.c[i] * (u[i] - u[i + 1]);
    if (i > 0) a += in.c[i - 1] * (u[i] - u[i - 1]);
    out[i] = a - pen.g_node(in.r[i], in.V[i], u[i]) * in.w[i];
  }
}

}  // namespace mpcert::kernels::omp
