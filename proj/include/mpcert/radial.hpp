#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mpcert/kernels.hpp"
#include "mpcert/penalization.hpp"
#include "mpcert/problem.hpp"

namespace mpcert {

/// Uniform mesh r_i = i h, h = R_max / M, with N-dimensional volume weights.
class RadialGrid {
 public:
  RadialGrid(int N, double r_max, int M);

  int dimension() const { return N_; }
  int cells() const { return M_; }
  std::size_t size() const { return r_.size(); }
  double r_max() const { return r_max_; }
  double h() const { return h_; }
  double omega() const { return omega_; }

  std::span<const double> r() const { return r_; }
  double r(std::size_t i) const { return r_[i]; }
  /// node weights: omega r_i^{N-1} h, halved at r_M, omega (h/2)^N / N at r_0
  std::span<const double> weights() const { return w_; }
  /// edge coefficients omega r_{i+1/2}^{N-1} / h, i < M
  std::span<const double> edges() const { return c_; }

 private:
  int N_;
  int M_;
  double r_max_;
  double h_;
  double omega_;
  std::vector<double> r_, w_, c_;
};

/// Throws DomainError unless N >= 3, R_max > 0, M >= 16.
RadialGrid build_grid(int N, double r_max, int M);

/// Nodal values on a grid; the last value is pinned to zero.
class DiscreteRadialFunction {
 public:
  explicit DiscreteRadialFunction(const RadialGrid& grid);
  DiscreteRadialFunction(const RadialGrid& grid, std::vector<double> values);
  static DiscreteRadialFunction sample(const RadialGrid& grid, const std::function<double(double)>& profile);

  const RadialGrid& grid() const { return *grid_; }
  std::size_t size() const { return u_.size(); }
  std::span<const double> values() const { return u_; }
  std::span<double> values() { return u_; }
  double operator[](std::size_t i) const { return u_[i]; }
  double& operator[](std::size_t i) { return u_[i]; }

  DiscreteRadialFunction& operator+=(const DiscreteRadialFunction& o);
  DiscreteRadialFunction& operator-=(const DiscreteRadialFunction& o);
  DiscreteRadialFunction& operator*=(double a);
  /// this += a * o
  DiscreteRadialFunction& axpy(double a, const DiscreteRadialFunction& o);

 private:
  const RadialGrid* grid_;
  std::vector<double> u_;
};

DiscreteRadialFunction operator+(DiscreteRadialFunction a, const DiscreteRadialFunction& b);
DiscreteRadialFunction operator-(DiscreteRadialFunction a, const DiscreteRadialFunction& b);
DiscreteRadialFunction operator*(double s, DiscreteRadialFunction a);

struct Gradient {
  DiscreteRadialFunction direction;  // Riesz representative B^{-1} rho
  std::vector<double> rho;           // weak-form residual, size M
  double residual;                   // (direction . rho)^{1/2}
};

/// Grid, potential samples and the factored preconditioner for one problem.
/// The referenced grid and penalized nonlinearity must outlive it.
class DiscreteProblem {
 public:
  DiscreteProblem(const RadialGrid& grid, const ProblemSpec& spec, const PenalizedNonlinearity& pen,
                  bool parallel = true);

  const RadialGrid& grid() const { return grid_; }
  const PenalizedNonlinearity& pen() const { return pen_; }
  const ProblemSpec& spec() const { return spec_; }
  std::span<const double> V() const { return V_; }

  /// sum c (du)^2 + sum V u^2 w; may be negative if (V1) fails at this resolution
  double norm_E_sq(const DiscreteRadialFunction& u) const;
  double norm_E(const DiscreteRadialFunction& u) const;
  double J(const DiscreteRadialFunction& u) const;
  /// rho = dJ(u), the weak-form residual
  void rho(const DiscreteRadialFunction& u, std::span<double> out) const;
  Gradient grad(const DiscreteRadialFunction& u) const;
  /// solves B d = rhs for the SPD preconditioner B = stiffness + diag((V+ + 1) w)
  void solve_B(std::span<const double> rhs, std::span<double> out) const;
  double dot(std::span<const double> a, std::span<const double> b) const;

 private:
  kernels::EnergyInputs inputs() const;

  const RadialGrid& grid_;
  ProblemSpec spec_;
  const PenalizedNonlinearity& pen_;
  bool parallel_;
  std::vector<double> V_, vw_;
  std::vector<double> b_diag_, b_off_;  // LDL^T factors of B
};

double norm_E(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u);
/// (sum |u_i|^e w_i)^{1/e}; e = infinity gives max |u_i|
double lp_norm(const RadialGrid& grid, const DiscreteRadialFunction& u, double exponent);
double energy_J(const RadialGrid& grid, const PenalizedNonlinearity& pen, const ProblemSpec& spec,
                const DiscreteRadialFunction& u);
Gradient grad_J(const RadialGrid& grid, const PenalizedNonlinearity& pen, const ProblemSpec& spec,
                const DiscreteRadialFunction& u);

}  // namespace mpcert
