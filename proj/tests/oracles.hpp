#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; only plain formulas and quadrature written out again.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double sphere_area(int N) { return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0); }

inline double ball_volume(int N, double r) { return sphere_area(N) * std::pow(r, N) / N; }

// composite trapezoid of f on [a, b] with n cells
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

// int_a^inf f(r) dr via r = a / t, t in (0, 1]; f must decay faster than 1/r
inline double tail(const std::function<double(double)>& f, double a, int n) {
  return trapezoid([&](double t) { return t <= 0.0 ? 0.0 : f(a / t) * a / (t * t); }, 0.0, 1.0, n);
}

// Rayleigh quotient int |grad u|^2 / (int |u|^{2*})^{2/2*} of the instanton
// (1+r^2)^{-(N-2)/2}: trapezoid with n cells on [0, r_max] plus the tail.
inline double instanton_quotient(int N, int n, double r_max) {
  const double b = (N - 2.0) / 2.0;
  const double two_star = 2.0 * N / (N - 2.0);
  const double om = sphere_area(N);
  auto grad2 = [&](double r) {
    const double du = -2.0 * b * r * std::pow(1.0 + r * r, -b - 1.0);
    return om * du * du * std::pow(r, N - 1);
  };
  auto upow = [&](double r) { return om * std::pow(1.0 + r * r, -b * two_star) * std::pow(r, N - 1); };
  const double G = trapezoid(grad2, 0.0, r_max, n) + tail(grad2, r_max, n);
  const double U = trapezoid(upow, 0.0, r_max, n) + tail(upow, r_max, n);
  return G / std::pow(U, 2.0 / two_star);
}

// closed-form Talenti constant
inline double talenti(int N) {
  return N * (N - 2.0) * std::numbers::pi * std::pow(std::tgamma(N / 2.0) / std::tgamma(N), 2.0 / N);
}

// sup_t [t^2 A/2 - B t^theta] + c2_ball
inline double d_closed(double A, double B, double theta, double c2_ball) {
  const double t = std::pow(A / (theta * B), 1.0 / (theta - 2.0));
  return t * t * A / 2.0 - B * std::pow(t, theta) + c2_ball;
}

struct Moser {
  double sigma, M;
};

// the final Moser inequality written out from its definitions
inline Moser moser(int N, double p, double a1, double a2, double alpha, double omega, double S, double u) {
  const double ts = 2.0 * N / (N - 2.0);
  const double tau = ts / (p - 2.0);
  const double taup = tau / (tau - 1.0);
  const double sigma = ts / (2.0 * taup);
  const double sk = std::pow(sigma, 2.0 * sigma / (sigma - 1.0));
  const double a3 = 2.0 * a1 * std::pow(u, p - 2.0) + (omega > 0.0 ? alpha * std::pow(omega, (p - 2.0) / ts) : 0.0);
  double a4 = 0.0;
  if (a2 > 0.0)
    a4 = std::pow(2.0, p - 1.0) * std::pow(a2, -p) * (a1 * std::pow(a2, p - 2.0) + 1.0) * (a2 + 1.0) *
             std::pow(1.0 + u, p - 1.0) +
         alpha * a2 * (1.0 + omega);
  const double a2t = a2 > 0.0 ? std::pow(a2, 2.0 * (sigma - 1.0)) : 0.0;
  const double M = std::pow(sk * 2.0 / S * (a3 + a4) + 2.0 * sk + a2t, 1.0 / (ts - p)) * (1.0 + u);
  return {sigma, M};
}

}  // namespace oracle
