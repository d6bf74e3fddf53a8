#pragma once

#include <span>

#include "mpcert/penalization.hpp"

// Nodal reductions and assembly loops behind the discrete energy. Two
// implementations with identical signatures: `serial` is the plain reference,
// `omp` splits the range into fixed blocks of kBlock nodes, reduces the blocks
// in parallel and adds the block partials in order, so its result does not
// depend on the thread count.
namespace mpcert::kernels {

inline constexpr std::size_t kBlock = 1024;

struct EnergyInputs {
  std::span<const double> r;   // nodes, size M+1
  std::span<const double> w;   // volume weights, size M+1
  std::span<const double> c;   // edge coefficients, size M
  std::span<const double> vw;  // V(r_i) w_i, size M+1
  std::span<const double> V;   // V(r_i), size M+1
};

namespace serial {
double dot(std::span<const double> a, std::span<const double> b);
double power_sum(std::span<const double> u, std::span<const double> w, double e);
double max_abs(std::span<const double> u);
/// sum_e c_e (u_{e+1} - u_e)^2 + sum_i vw_i u_i^2
double quadratic_form(const EnergyInputs& in, std::span<const double> u);
/// sum_i G(r_i, u_i) w_i
double primitive_sum(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u);
/// out_i = (A u)_i - g(r_i, u_i) w_i for i < M
void residual(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u,
              std::span<double> out);
}  // namespace serial

namespace omp {
double dot(std::span<const double> a, std::span<const double> b);
double power_sum(std::span<const double> u, std::span<const double> w, double e);
double max_abs(std::span<const double> u);
double quadratic_form(const EnergyInputs& in, std::span<const double> u);
double primitive_sum(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u);
void residual(const PenalizedNonlinearity& pen, const EnergyInputs& in, std::span<const double> u,
              std::span<double> out);
}  // namespace omp

}  // namespace mpcert::kernels
