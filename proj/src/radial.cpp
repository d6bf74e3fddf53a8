#include "mpcert/radial.hpp"

#include <cmath>

namespace mpcert {

RadialGrid::RadialGrid(int N, double r_max, int M) : N_(N), M_(M), r_max_(r_max) {
  if (N < 3) throw DomainError("build_grid: N must be >= 3");
  if (!(r_max > 0.0)) throw DomainError("build_grid: R_max must be > 0");
  if (M < 16) throw DomainError("build_grid: M must be >= 16");
  h_ = r_max / M;
  omega_ = sphere_area(N);
  r_.resize(M + 1);
  w_.resize(M + 1);
  c_.resize(M);
  for (int i = 0; i <= M; ++i) {
    r_[i] = (i == M) ? r_max : i * h_;
    w_[i] = omega_ * std::pow(r_[i], N - 1) * h_;
  }
  w_[0] = omega_ * std::pow(0.5 * h_, N) / N;
  w_[M] *= 0.5;
  for (int i = 0; i < M; ++i) c_[i] = omega_ * std::pow((i + 0.5) * h_, N - 1) / h_;
}

RadialGrid build_grid(int N, double r_max, int M) { return RadialGrid(N, r_max, M); }

// ---------------------------------------------------------------------------

DiscreteRadialFunction::DiscreteRadialFunction(const RadialGrid& grid) : grid_(&grid), u_(grid.size(), 0.0) {}

DiscreteRadialFunction::DiscreteRadialFunction(const RadialGrid& grid, std::vector<double> values)
    : grid_(&grid), u_(std::move(values)) {
  if (u_.size() != grid.size())
    throw PreconditionError("DiscreteRadialFunction: " + std::to_string(u_.size()) + " values for " +
                            std::to_string(grid.size()) + " nodes");
  if (u_.back() != 0.0) throw PreconditionError("DiscreteRadialFunction: value at R_max must be 0");
}

DiscreteRadialFunction DiscreteRadialFunction::sample(const RadialGrid& grid,
                                                      const std::function<double(double)>& profile) {
  DiscreteRadialFunction u(grid);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) u.u_[i] = profile(grid.r(i));
  return u;
}

DiscreteRadialFunction& DiscreteRadialFunction::operator+=(const DiscreteRadialFunction& o) { return axpy(1.0, o); }
DiscreteRadialFunction& DiscreteRadialFunction::operator-=(const DiscreteRadialFunction& o) { return axpy(-1.0, o); }

DiscreteRadialFunction& DiscreteRadialFunction::operator*=(double a) {
  for (double& x : u_) x *= a;
  return *this;
}

DiscreteRadialFunction& DiscreteRadialFunction::axpy(double a, const DiscreteRadialFunction& o) {
  if (o.u_.size() != u_.size()) throw PreconditionError("DiscreteRadialFunction: size mismatch");
  for (std::size_t i = 0; i < u_.size(); ++i) u_[i] += a * o.u_[i];
  return *this;
}

DiscreteRadialFunction operator+(DiscreteRadialFunction a, const DiscreteRadialFunction& b) { return a += b; }
DiscreteRadialFunction operator-(DiscreteRadialFunction a, const DiscreteRadialFunction& b) { return a -= b; }
DiscreteRadialFunction operator*(double s, DiscreteRadialFunction a) { return a *= s; }

// ---------------------------------------------------------------------------

DiscreteProblem::DiscreteProblem(const RadialGrid& grid, const ProblemSpec& spec, const PenalizedNonlinearity& pen,
                                 bool parallel)
    : grid_(grid), spec_(spec), pen_(pen), parallel_(parallel) {
  if (grid.dimension() != spec.dimension) throw PreconditionError("DiscreteProblem: grid and spec dimensions differ");
  const std::size_t n = grid.size();
  const int M = grid.cells();
  const Potential pot = spec.V();
  V_.resize(n);
  vw_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    V_[i] = pot(grid.r(i));
    vw_[i] = V_[i] * grid.weights()[i];
  }

  pen.reserve_nodes(n);

  // B on unknowns 0..M-1; Thomas / LDL^T factorisation
  const auto c = grid.edges();
  const auto w = grid.weights();
  b_diag_.resize(M);
  b_off_.resize(M);
  for (int i = 0; i < M; ++i) {
    double a = c[i] + (std::max(V_[i], 0.0) + 1.0) * w[i];
    if (i > 0) a += c[i - 1];
    b_off_[i] = (i + 1 < M) ? -c[i] : 0.0;
    if (i > 0) a -= b_off_[i - 1] * b_off_[i - 1] / b_diag_[i - 1];
    if (!(a > 0.0)) throw SolverError("preconditioner lost positive definiteness at node " + std::to_string(i));
    b_diag_[i] = a;
  }
}

kernels::EnergyInputs DiscreteProblem::inputs() const {
  return {grid_.r(), grid_.weights(), grid_.edges(), vw_, V_};
}

double DiscreteProblem::dot(std::span<const double> a, std::span<const double> b) const {
  return parallel_ ? kernels::omp::dot(a, b) : kernels::serial::dot(a, b);
}

double DiscreteProblem::norm_E_sq(const DiscreteRadialFunction& u) const {
  return parallel_ ? kernels::omp::quadratic_form(inputs(), u.values())
                   : kernels::serial::quadratic_form(inputs(), u.values());
}

double DiscreteProblem::norm_E(const DiscreteRadialFunction& u) const {
  const double sq = norm_E_sq(u);
  if (sq < 0.0)
    throw HypothesisViolation("(V1)", "negative energy norm squared " + std::to_string(sq) + " at this resolution");
  return std::sqrt(sq);
}

double DiscreteProblem::J(const DiscreteRadialFunction& u) const {
  const double gsum = parallel_ ? kernels::omp::primitive_sum(pen_, inputs(), u.values())
                                : kernels::serial::primitive_sum(pen_, inputs(), u.values());
  return 0.5 * norm_E_sq(u) - gsum;
}

void DiscreteProblem::rho(const DiscreteRadialFunction& u, std::span<double> out) const {
  if (parallel_)
    kernels::omp::residual(pen_, inputs(), u.values(), out);
  else
    kernels::serial::residual(pen_, inputs(), u.values(), out);
}

void DiscreteProblem::solve_B(std::span<const double> rhs, std::span<double> out) const {
  const std::size_t M = b_diag_.size();
  // forward: L y = rhs
  out[0] = rhs[0];
  for (std::size_t i = 1; i < M; ++i) out[i] = rhs[i] - b_off_[i - 1] / b_diag_[i - 1] * out[i - 1];
  // D^{-1} then L^T
  out[M - 1] /= b_diag_[M - 1];
  for (std::size_t i = M - 1; i-- > 0;) out[i] = out[i] / b_diag_[i] - b_off_[i] / b_diag_[i] * out[i + 1];
}

Gradient DiscreteProblem::grad(const DiscreteRadialFunction& u) const {
  const std::size_t M = grid_.cells();
  Gradient g{DiscreteRadialFunction(grid_), std::vector<double>(M), 0.0};
  rho(u, g.rho);
  solve_B(g.rho, g.direction.values().first(M));
  const double dr = dot(g.direction.values().first(M), g.rho);
  g.residual = std::sqrt(std::max(0.0, dr));
  return g;
}

// ---------------------------------------------------------------------------

double norm_E(const RadialGrid& grid, const ProblemSpec& spec, const DiscreteRadialFunction& u) {
  const PenalizedNonlinearity pen(spec);
  return DiscreteProblem(grid, spec, pen).norm_E(u);
}

double lp_norm(const RadialGrid& grid, const DiscreteRadialFunction& u, double exponent) {
  if (std::isinf(exponent)) return kernels::omp::max_abs(u.values());
  if (!(exponent >= 1.0)) throw DomainError("lp_norm: exponent must be >= 1");
  return std::pow(kernels::omp::power_sum(u.values(), grid.weights(), exponent), 1.0 / exponent);
}

double energy_J(const RadialGrid& grid, const PenalizedNonlinearity& pen, const ProblemSpec& spec,
                const DiscreteRadialFunction& u) {
  return DiscreteProblem(grid, spec, pen).J(u);
}

Gradient grad_J(const RadialGrid& grid, const PenalizedNonlinearity& pen, const ProblemSpec& spec,
                const DiscreteRadialFunction& u) {
  return DiscreteProblem(grid, spec, pen).grad(u);
}

}  // namespace mpcert
