#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "mpcert/problem.hpp"

namespace mpcert {

/// The clamped nonlinearity f~, its splice g with f at |x| = R, and the
/// primitive G. In odd mode every evaluator is the odd extension of its s > 0
/// branch (G even).
class PenalizedNonlinearity {
 public:
  explicit PenalizedNonlinearity(const ProblemSpec& spec);
  ~PenalizedNonlinearity();
  PenalizedNonlinearity(PenalizedNonlinearity&&) noexcept;
  PenalizedNonlinearity& operator=(PenalizedNonlinearity&&) noexcept;

  double k() const { return k_; }
  bool odd() const { return odd_; }
  double radius() const { return R_; }
  const Potential& V() const { return V_; }
  const Nonlinearity& f() const { return f_; }

  double f_tilde(double r, double s) const;
  double g(double r, double s) const;
  /// same, with V(r) supplied by the caller
  double g(double r, double Vr, double s) const;
  double G(double r, double s) const;

  /// Same as G but memoises the branch crossings of f~ under `node`. An entry
  /// remembers its radius, so reusing indices across grids is safe but slow.
  double G_node(std::size_t node, double r, double s) const;
  double G_node(std::size_t node, double r, double Vr, double s) const;
  /// g as seen by the nodal quadrature: a node sitting on |x| = R carries the
  /// mean of f and f~ (G_node does the same), elsewhere plain g.
  double g_node(double r, double Vr, double s) const;
  bool on_interface(double r) const { return std::abs(r - R_) <= 1e-12 * R_; }
  /// Sizes the lock-free part of the cache for node indices below n. Not to be
  /// called while other threads evaluate.
  void reserve_nodes(std::size_t n) const;

  /// How many G evaluations fell back to plain quadrature.
  std::size_t fallback_count() const { return fallbacks_->load(); }

 private:
  struct Pieces;
  struct Cache;

  double f_tilde_pos(double Vr, double r, double s) const;
  int branch(double Vr, double r, double t) const;
  void scan_block(double Vr, double r, int block, Pieces& out) const;
  double integrate(double Vr, double r, const Pieces& pc, double s) const;
  double G_pos(double Vr, double r, double s, std::size_t node, bool use_cache) const;

  double k_;
  bool odd_;
  double R_;
  Potential V_;
  Nonlinearity f_;
  std::unique_ptr<Cache> cache_;
  std::unique_ptr<std::atomic<std::size_t>> fallbacks_;
};

/// k = 2 theta / (theta - 2). Throws DomainError for theta <= 2.
PenalizedNonlinearity make_penalized(const ProblemSpec& spec);

}  // namespace mpcert
