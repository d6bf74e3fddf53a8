#include <cmath>

#include "mpcert/kernels.hpp"

namespace mpcert::kernels::serial {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double power_sum(std::span<const double> u, std::span<const double> w, double e) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), e) * w[i];
  return s;
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

double quadratic_form(const EnergyInputs& in, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t e = 0; e < in.c.size(); ++e) {
    const double d = u[e + 1] - u[e];
    s += in.c[e] * d * d;
  }
  for (std::size_t i = 0; i < u.size(); ++i) s += in.vw[i] * u[i] * u[i];
  return s;
}

double primitive_sum(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += pen.G_node(i, in.r[i], in.V[i], u[i]) * in.w[i];
  return s;
}

void residual(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u,
              std::span<double> out) {
  const std::size_t M = in.c.size();
  for (std::size_t i = 0; i < M; ++i) {
    double a = in.vw[i] * u[i] + in.c[i] * (u[i] - u[i + 1]);
    if (i > 0) a += in.c[i - 1] * (u[i] - u[i - 1]);
    out[i] = a - pen.g_node(in.r[i], in.V[i], u[i]) * in.w[i];
  }
}

}  // namespace mpcert::kernels::serial
