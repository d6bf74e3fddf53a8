#include "mpcert/shooting.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace mpcert {

namespace {

using State = std::array<double, 2>;
namespace ode = boost::numeric::odeint;

enum class Fate { turns_up, crosses, undecided };

struct Run {
  Fate fate = Fate::undecided;
  std::size_t last = 0;  // last grid node reached before the event
  std::vector<double> u;
};

class Shooter {
 public:
  Shooter(const ProblemSpec& spec, const RadialGrid& grid) : N_(spec.dimension), V_(spec.V()), f_(spec.f()), grid_(grid) {}

  Run shoot(double s) const {
    Run run;
    run.u.assign(grid_.size(), 0.0);
    run.u[0] = s;

    // series start u = s + a r^2 / 2, a = (V(0) s - f(s)) / N
    const double a = (V_(0.0) * s - f_(0.0, s)) / N_;
    const double r_start = 1e-3 * grid_.h();
    State x{s + 0.5 * a * r_start * r_start, a * r_start};

    auto rhs = [this](const State& y, State& dy, double r) {
      dy[0] = y[1];
      dy[1] = V_(r) * y[0] - f_(r, y[0]) - (N_ - 1.0) / r * y[1];
    };
    auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
    stepper.initialize(x, r_start, 0.1 * grid_.h());

    const double r_end = grid_.r_max();
    std::size_t next = 1;
    State y;
    while (next < grid_.size()) {
      const auto [t0, t1] = stepper.do_step(rhs);
      (void)t0;
      for (; next < grid_.size() && grid_.r(next) <= t1; ++next) {
        stepper.calc_state(grid_.r(next), y);
        if (y[0] < 0.0) {
          run.fate = Fate::crosses;
          return run;
        }
        if (y[1] > 0.0 || !std::isfinite(y[0])) {
          run.fate = Fate::turns_up;
          return run;
        }
        run.u[next] = y[0];
        run.last = next;
      }
      if (t1 >= r_end) break;
      const State& cur = stepper.current_state();
      if (cur[0] < 0.0) {
        run.fate = Fate::crosses;
        return run;
      }
      if (cur[1] > 0.0 || !std::isfinite(cur[0])) {
        run.fate = Fate::turns_up;
        return run;
      }
    }
    return run;
  }

 private:
  int N_;
  Potential V_;
  Nonlinearity f_;
  const RadialGrid& grid_;
};

}  // namespace

ShootingResult shooting_oracle(const ProblemSpec& spec, const RadialGrid& grid) {
  spec.validate();
  const Nonlinearity f = spec.f();
  if (!f.autonomous()) throw PreconditionError("shooting_oracle: f must not depend on r");
  if (grid.dimension() != spec.dimension) throw PreconditionError("shooting_oracle: grid and spec dimensions differ");
  const Shooter sh(spec, grid);

  double lo = kNaN, hi = kNaN;
  Run run_lo, run_hi;
  double prev = 1e-6;
  Run prev_run = sh.shoot(prev);
  for (double s = 2e-6; s <= 1e6; s *= 2.0) {
    Run cur = sh.shoot(s);
    if (prev_run.fate == Fate::turns_up && cur.fate == Fate::crosses) {
      lo = prev;
      hi = s;
      run_lo = std::move(prev_run);
      run_hi = std::move(cur);
      break;
    }
    prev = s;
    prev_run = std::move(cur);
  }
  if (std::isnan(lo)) throw OracleInconclusive("shooting_oracle: no change of behaviour for u(0) in [1e-6, 1e6]");

  int steps = 0;
  while (hi - lo > 1e-15 * hi && steps < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Run r = sh.shoot(mid);
    ++steps;
    if (r.fate == Fate::turns_up) {
      lo = mid;
      run_lo = std::move(r);
    } else if (r.fate == Fate::crosses) {
      hi = mid;
      run_hi = std::move(r);
    } else {
      break;  // reaches R_max without either event: resolution exhausted
    }
  }

  ShootingResult out(grid);
  out.u0 = 0.5 * (lo + hi);
  out.bracket = (hi - lo) / hi;
  out.bisections = steps;
  const std::size_t last = std::min(run_lo.last, run_hi.last);
  auto u = out.profile.values();
  for (std::size_t i = 1; i <= last && i + 1 < grid.size(); ++i) u[i] = 0.5 * (run_lo.u[i] + run_hi.u[i]);
  u[0] = out.u0;
  return out;
}

}  // namespace mpcert
