#include "mpcert/hypotheses.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace mpcert {

double sobolev_constant(int N) {
  if (N < 3) throw DomainError("sobolev_constant: N must be >= 3, got " + std::to_string(N));
  const double ratio = std::tgamma(0.5 * N) / std::tgamma(static_cast<double>(N));
  return N * (N - 2.0) * std::numbers::pi * std::pow(ratio, 2.0 / N);
}

std::vector<double> SampleProbe::s_values() const {
  const int n = s_decades * s_per_decade;
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k) out[k] = s_max * std::pow(10.0, static_cast<double>(k - n) / s_per_decade);
  return out;
}

std::vector<double> SampleProbe::r_values() const {
  std::vector<double> out(r_samples);
  for (int i = 0; i < r_samples; ++i) out[i] = r_max * i / std::max(1, r_samples - 1);
  return out;
}

namespace {

constexpr int kBrentBits = 50;

// min of h on [a, b] seeded by a discrete argmin
template <class H>
std::pair<double, double> refine_min(H h, double a, double b) {
  if (!(b > a)) return {a, h(a)};
  const auto [x, fx] = boost::math::tools::brent_find_minima(h, a, b, kBrentBits);
  return {x, fx};
}

template <class H>
std::pair<double, double> refine_max(H h, double a, double b) {
  auto neg = [&](double x) { return -h(x); };
  const auto [x, fx] = refine_min(neg, a, b);
  return {x, -fx};
}

// Sample points on [a, b]: uniform up to a + span, geometric beyond.
std::vector<double> radial_samples(double a, double b, double span, int n) {
  std::vector<double> rs;
  const double lin_end = std::min(b, a + span);
  for (int i = 0; i <= n; ++i) rs.push_back(a + (lin_end - a) * i / n);
  if (b > lin_end) {
    const double ratio = std::pow(b / lin_end, 1.0 / n);
    double r = lin_end;
    for (int i = 1; i <= n; ++i) {
      r = (i == n) ? b : r * ratio;
      rs.push_back(r);
    }
  }
  return rs;
}

constexpr double kTailCap = 1e12;

}  // namespace

TailInfimum tail_infimum(const Potential& V, const TailWeight& w, double R, const SampleProbe& probe) {
  const TailBehavior tail = V.tail(w, R);
  TailInfimum out;
  double r_end = std::max(probe.r_max, 2.0 * R);
  if (std::isfinite(tail.monotone_from) && tail.monotone_from <= kTailCap) {
    r_end = std::max(r_end, tail.monotone_from);
  } else {
    out.certified = false;
    r_end = std::max(r_end, 1e3 * R);
  }
  auto h = [&](double r) {
    const double v = V(r);
    if (v == 0.0) return 0.0;
    return w(r) * v;
  };
  const auto rs = radial_samples(R, r_end, std::max(probe.r_max, R), probe.v_samples);
  std::size_t best = 0;
  double best_val = kInf;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double v = h(rs[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  out.value = best_val;
  out.argmin = rs[best];
  if (std::isfinite(best_val)) {
    const double lo = rs[best == 0 ? 0 : best - 1];
    const double hi = rs[std::min(rs.size() - 1, best + 1)];
    const auto [x, fx] = refine_min(h, lo, hi);
    if (fx < out.value) {
      out.value = fx;
      out.argmin = x;
    }
  }
  if (!tail.increasing && tail.limit < out.value) {
    out.value = tail.limit;
    out.argmin = kInf;
  }
  return out;
}

OmegaStats omega_stats(const ProblemSpec& spec, const SampleProbe& probe) {
  const Potential V = spec.V();
  const int N = spec.dimension;
  OmegaStats out;
  const TailBehavior tail = V.tail(TailWeight{}, 0.0);

  double r_end = probe.r_max;
  if (std::isfinite(tail.monotone_from) && tail.monotone_from <= kTailCap) r_end = std::max(r_end, tail.monotone_from);
  if (tail.increasing) {
    // V non-decreasing beyond r_end; push r_end to where V turns nonnegative
    while (V(r_end) < 0.0 && r_end < kTailCap) r_end *= 2.0;
    out.bounded = V(r_end) >= 0.0;
  } else {
    out.bounded = tail.limit >= 0.0;
  }

  const int n = probe.v_samples;
  std::vector<double> rs(n + 1), vs(n + 1);
  for (int i = 0; i <= n; ++i) {
    rs[i] = r_end * i / n;
    vs[i] = V(rs[i]);
  }
  auto crossing = [&](double a, double b) {
    const bool neg_a = V(a) < 0.0;
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
      const double m = 0.5 * (a + b);
      ((V(m) < 0.0) == neg_a ? a : b) = m;
    }
    return 0.5 * (a + b);
  };

  const double omega = sphere_area(N);
  double measure = 0.0;
  double start = vs[0] < 0.0 ? 0.0 : kNaN;
  for (int i = 1; i <= n; ++i) {
    const bool neg_prev = vs[i - 1] < 0.0, neg = vs[i] < 0.0;
    if (neg_prev == neg) continue;
    const double c = crossing(rs[i - 1], rs[i]);
    if (neg) {
      start = c;
    } else {
      measure += omega / N * (std::pow(c, N) - std::pow(start, N));
      out.omega_radius = c;
      start = kNaN;
    }
  }
  if (!std::isnan(start)) {
    // still negative at r_end
    if (out.bounded) {
      measure += omega / N * (std::pow(r_end, N) - std::pow(start, N));
      out.omega_radius = r_end;
    }
  }
  out.omega_measure = out.bounded ? measure : kInf;

  const auto it = std::min_element(vs.begin(), vs.end());
  const std::size_t i = static_cast<std::size_t>(it - vs.begin());
  double vmin = *it;
  if (!std::isfinite(vmin)) {
    out.v_bounded_below = false;
    out.alpha = kInf;
    return out;
  }
  if (vmin < 0.0) {
    const double lo = rs[i == 0 ? 0 : i - 1];
    const double hi = rs[std::min<std::size_t>(n, i + 1)];
    vmin = std::min(vmin, refine_min([&](double r) { return V(r); }, lo, hi).second);
  }
  if (!out.bounded && !tail.increasing) vmin = std::min(vmin, tail.limit);
  out.alpha = std::max(0.0, -vmin);
  return out;
}

// ---------------------------------------------------------------------------

bool HypothesisReport::all_ok() const { return failures().empty(); }

std::vector<std::string> HypothesisReport::failures() const {
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* name) {
    if (!ok) out.emplace_back(name);
  };
  if (mode == CheckMode::exponential) {
    need(f_hat1_ok, "(f^1)");
  } else {
    need(f1_ok, "(f1)");
  }
  need(f2_ok, "(f2)");
  need(f3_ok, "(f3)");
  need(f4_ok, "(f4)");
  need(v1_ok, "(V1)");
  if (mode == CheckMode::standard) need(v2_ok, "(V2)");
  if (mode == CheckMode::exponential) need(v4_ok, "(V4)");
  return out;
}

namespace {

// sup over r-samples and the decades [lo, 10 lo], [10 lo, 100 lo] of a sampled s-profile
struct DecadeSup {
  double first = -kInf;
  double second = -kInf;
};

template <class Value>
DecadeSup decade_sups(const std::vector<double>& svals, const std::vector<double>& rvals, double s_lo, Value value) {
  DecadeSup out;
  for (double s : svals) {
    if (s < s_lo) continue;
    double* slot = s <= 10.0 * s_lo ? &out.first : (s <= 100.0 * s_lo ? &out.second : nullptr);
    if (!slot) break;
    for (double r : rvals) *slot = std::max(*slot, value(r, s));
  }
  return out;
}

bool decade_bounded(const DecadeSup& d) {
  return std::isfinite(d.first) && d.first <= d.second + 1e-6 * std::abs(d.second) + 1e-12;
}

}  // namespace

HypothesisReport check_hypotheses(const ProblemSpec& spec, const SampleProbe& probe, CheckMode mode,
                                  const std::vector<SweepPair>& sweep) {
  HypothesisReport rep;
  rep.mode = mode;
  const Nonlinearity f = spec.f();
  const Potential V = spec.V();
  const int N = spec.dimension;
  const auto svals = probe.s_values();
  const auto rvals = probe.r_values();
  std::vector<double> signs{1.0};
  if (spec.odd) signs.push_back(-1.0);

  // (f1) / (f^1)
  if (mode != CheckMode::exponential) {
    const auto sup = decade_sups(svals, rvals, svals.front(), [&](double r, double s) {
      double v = 0.0;
      for (double sg : signs) v = std::max(v, std::abs(sg * s * f(r, sg * s)) / std::pow(s, spec.q));
      return v;
    });
    rep.f1_bound = sup.first;
    rep.f1_ok = decade_bounded(sup);
  } else {
    const double a = spec.exp_a, q = spec.q;
    const double s_lo = std::max(svals.front(), std::pow(a / 600.0, 1.0 / q));
    const auto sup = decade_sups(svals, rvals, s_lo, [&](double r, double s) {
      double v = 0.0;
      for (double sg : signs) v = std::max(v, std::abs(f(r, sg * s)) * std::exp(a / std::pow(s, q)));
      return v;
    });
    rep.f_hat1_bound = sup.first;
    rep.f_hat1_ok = decade_bounded(sup);
    rep.f1_ok = rep.f_hat1_ok;
  }

  // (f2), (f3), (f4)
  double f2_margin = kInf;
  bool f2_ok = true, f3_ok = true, f4_ok = true;
  std::vector<double> f3_s;
  if (spec.s0 > 0.0) f3_s.push_back(spec.s0);
  for (double s : svals)
    if (s >= spec.s0) f3_s.push_back(s);
  for (double s : svals) {
    for (double r : rvals) {
      for (double sg : signs) {
        const double fs = f(r, sg * s);
        const double bound = spec.a1 * std::pow(s, spec.p - 1.0) + spec.a2;
        f2_margin = std::min(f2_margin, bound - std::abs(fs));
        f2_ok = f2_ok && within_tol(std::abs(fs), bound);
      }
      if (spec.odd) f4_ok = f4_ok && f(r, -s) == -f(r, s);
    }
  }
  for (double s : f3_s) {
    for (double r : rvals) {
      for (double sg : signs) {
        const double x = sg * s;
        const double lhs = x * f(r, x), rhs = spec.theta * f.primitive(r, x);
        const bool ok = rhs > 0.0 && within_tol(rhs, lhs);
        if (!ok && f3_ok) rep.f3_witness = std::make_pair(r, x);
        f3_ok = f3_ok && ok;
      }
    }
  }
  rep.f2_margin = f2_margin;
  rep.f2_ok = f2_ok;
  rep.f3_ok = f3_ok;
  rep.f4_ok = f4_ok;

  // (V1), (V12)
  const OmegaStats om = omega_stats(spec, probe);
  rep.omega_measure = om.omega_measure;
  rep.alpha = om.alpha;
  rep.sobolev_S = sobolev_constant(N);
  const bool omega_empty = om.omega_measure == 0.0 && om.alpha == 0.0;
  rep.v1_case = omega_empty ? V1Case::nonnegative_with_well : V1Case::sign_changing;
  rep.v_infty = spec.bump_ceiling();
  double sup_ball = -kInf;
  for (int i = 0; i <= 2048; ++i) sup_ball = std::max(sup_ball, V(spec.r0 * i / 2048.0));
  rep.v12_ok = within_tol(sup_ball, rep.v_infty);
  if (omega_empty) {
    rep.v1_margin = kInf;
    rep.v1_ok = rep.v12_ok;
  } else if (!om.bounded || !om.v_bounded_below) {
    rep.v1_margin = -kInf;
    rep.v1_ok = false;
    rep.warnings.push_back("(V1): Omega = {V < 0} is unbounded or V unbounded below");
  } else {
    rep.v1_margin = rep.sobolev_S / std::pow(om.omega_measure, 2.0 / N) - om.alpha;
    rep.v1_ok = rep.v1_margin > 0.0;
  }

  auto note_tail = [&](const TailInfimum& t, const char* name) {
    if (!t.certified) {
      rep.tail_certified = false;
      rep.warnings.push_back(std::string(name) + ": tail infimum from sampling only");
    }
  };

  // (V2), (V3)
  if (spec.q > 2.0) {
    const double beta = spec.decay_exponent();
    const TailInfimum t = tail_infimum(V, TailWeight{TailWeight::Kind::power, beta}, spec.radius_R, probe);
    note_tail(t, "(V2)");
    rep.v2_inf = t.value;
    rep.v2_ok = t.value > 0.0;
    rep.v3_inf = t.value / std::pow(spec.radius_R, beta);
  }

  // (V4), (V6)
  if (mode == CheckMode::exponential) {
    const double kappa = (N - 2.0) * spec.q;
    const TailWeight w4{TailWeight::Kind::exponential, kappa, spec.exp_mu};
    const TailInfimum t4 = tail_infimum(V, w4, spec.radius_R, probe);
    note_tail(t4, "(V4)");
    rep.v4_inf = t4.value;
    rep.v4_ok = t4.value > 0.0;
    const TailWeight w6{TailWeight::Kind::exponential, kappa, spec.exp_mu / std::pow(spec.radius_R, kappa)};
    const TailInfimum t6 = tail_infimum(V, w6, spec.radius_R, probe);
    note_tail(t6, "(V6)");
    rep.v6_inf = t6.value;
    rep.v6_ok = t6.value > 0.0;
  }

  // (V5)
  if (mode == CheckMode::sweep && spec.q > 2.0) {
    const double beta = spec.decay_exponent();
    for (const auto& pr : sweep) {
      const TailInfimum t = tail_infimum(V, TailWeight{TailWeight::Kind::power, beta}, pr.R, probe);
      note_tail(t, "(V5)");
      rep.v5_inf.push_back(t.value);
      rep.v5_ok.push_back(within_tol(pr.Lambda, t.value));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

double growth_constant_near_zero(const ProblemSpec& spec, double cap, const SampleProbe& probe) {
  if (!(cap > 0.0)) throw PreconditionError("growth_constant_near_zero: cap must be > 0");
  const Nonlinearity f = spec.f();
  const auto rvals = probe.r_values();
  const bool expo = spec.mode == Mode::exponential;
  const double a_hat = 0.5 * spec.exp_a;

  // log of the ratio whose supremum is C
  auto log_ratio = [&](double r, double s) {
    double fs = std::abs(f(r, s));
    if (spec.odd) fs = std::max(fs, std::abs(f(r, -s)));
    if (fs == 0.0) return -kInf;
    if (expo) return std::log(fs) + a_hat / std::pow(s, spec.q) - std::log(s);
    return std::log(fs) - (spec.q - 1.0) * std::log(s);
  };

  // fixed absolute log grid so that the sample set only grows with cap
  const int spd = probe.s_per_decade;
  std::vector<double> svals;
  for (int k = -12 * spd;; ++k) {
    const double s = std::pow(10.0, static_cast<double>(k) / spd);
    if (s >= cap) break;
    svals.push_back(s);
  }
  svals.push_back(cap);

  double best = -kInf;
  double best_r = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < svals.size(); ++k) {
    for (double r : rvals) {
      const double v = log_ratio(r, svals[k]);
      if (v > best) {
        best = v;
        best_r = r;
        best_k = k;
      }
    }
  }

  // divergence towards s = 0: first decade beats the second
  if (svals.size() > static_cast<std::size_t>(2 * spd)) {
    double d0 = -kInf, d1 = -kInf;
    for (int k = 0; k < spd; ++k)
      for (double r : rvals) d0 = std::max(d0, log_ratio(r, svals[k]));
    for (int k = spd; k < 2 * spd; ++k)
      for (double r : rvals) d1 = std::max(d1, log_ratio(r, svals[k]));
    if (std::isfinite(d0) && d0 > d1 + 1e-6) {
      throw HypothesisViolation(expo ? "(f^1)" : "(f1)",
                                "sup |f(r,s)| / |s|^(q-1) diverges as s -> 0 (ratio grows by " +
                                    std::to_string(std::exp(d0 - d1)) + " over the last decade)");
    }
  }
  if (!std::isfinite(best)) return best == -kInf ? 0.0 : kInf;

  const double lo = svals[best_k == 0 ? 0 : best_k - 1];
  const double hi = svals[std::min(svals.size() - 1, best_k + 1)];
  const auto [x, fx] = refine_max([&](double s) { return log_ratio(best_r, s); }, lo, hi);
  return std::exp(std::max(best, fx));
}

double ar_defect_constant(const ProblemSpec& spec, const SampleProbe& probe) {
  if (spec.s0 == 0.0) return 0.0;
  const Nonlinearity f = spec.f();
  const double s_top = spec.s0 * (1.0 + 1e-2);
  auto defect = [&](double r, double s) { return f.primitive(r, s) - s * f(r, s) / spec.theta; };
  constexpr int ns = 512;
  double best = 0.0, best_r = 0.0, best_s = 0.0;
  for (int ir = 0; ir < probe.r_samples; ++ir) {
    const double r = spec.radius_R * ir / std::max(1, probe.r_samples - 1);
    for (int is = 1; is <= ns; ++is) {
      const double s = s_top * is / ns;
      const double v = defect(r, s);
      if (v > best) {
        best = v;
        best_r = r;
        best_s = s;
      }
    }
  }
  if (best > 0.0) {
    const double ds = s_top / ns;
    const auto [x, fx] = refine_max([&](double s) { return defect(best_r, s); }, std::max(0.0, best_s - ds),
                                    std::min(s_top, best_s + ds));
    best = std::max(best, fx);
  }
  return best;
}

}  // namespace mpcert
