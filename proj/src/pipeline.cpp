#include "mpcert/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/version.hpp>
#include <json.hpp>

namespace mpcert {

using json = nlohmann::ordered_json;

Report::Report() = default;
Report::Report(Report&&) noexcept = default;
Report& Report::operator=(Report&&) noexcept = default;
Report::~Report() = default;

Command command_from_string(const std::string& name) {
  if (name == "check") return Command::check;
  if (name == "thresholds") return Command::thresholds;
  if (name == "solve") return Command::solve;
  if (name == "certify") return Command::certify;
  if (name == "sweep") return Command::sweep;
  throw PreconditionError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::check: return "check";
    case Command::thresholds: return "thresholds";
    case Command::solve: return "solve";
    case Command::certify: return "certify";
    case Command::sweep: return "sweep";
  }
  return "?";
}

namespace {

using clock_type = std::chrono::steady_clock;

// Runs one stage; exceptions become rep.aborted. Returns false once aborted.
template <class F>
bool stage(Report& rep, const char* name, F&& body) {
  if (rep.aborted) return false;
  const auto t0 = clock_type::now();
  try {
    body();
  } catch (const HypothesisViolation& e) {
    rep.aborted = StageError{name, e.what(), true};
  } catch (const std::exception& e) {
    rep.aborted = StageError{name, e.what(), false};
  }
  rep.timings.emplace_back(name, std::chrono::duration<double>(clock_type::now() - t0).count());
  return !rep.aborted;
}

CheckMode check_mode(const RunConfig& cfg, Command command) {
  if (command == Command::sweep) return CheckMode::sweep;
  return cfg.spec.mode == Mode::exponential ? CheckMode::exponential : CheckMode::standard;
}

// radius of the bump that seeds the endpoint: narrow enough that the bump
// does not spread mass where V is large, never below 8 cells
double endpoint_radius(const ProblemSpec& spec, const RadialGrid& grid) {
  const double V0 = spec.V()(0.0);
  double r = spec.r0;
  if (V0 > 0.0) r = std::min(r, 3.0 / std::sqrt(V0));
  return std::max(r, 8.0 * grid.h());
}

void run_certificates(Report& rep, const DiscreteProblem& problem, const ChainInputs& in) {
  const ProblemSpec& spec = rep.cfg.spec;
  const RadialGrid& grid = *rep.grid;
  const DiscreteRadialFunction& u = rep.solve->u;
  const Chain& chain = *rep.chain;

  rep.moser_u = moser_constants(spec, lp_norm(grid, u, critical_exponent(spec.dimension)), in.moser);

  rep.certificates.push_back({check_norm_bound(problem, u, chain.bounds), true});
  rep.certificates.push_back({check_linf_bound(grid, spec, u, in.moser), true});
  rep.certificates.push_back({check_decay(grid, u, rep.moser_u->M, spec.radius_R), true});
  rep.certificates.push_back({check_consistency(grid, spec, *rep.pen, u), true});

  rep.moser_chain = moser_diagnostic(grid, spec, u, rep.cfg.moser_j_max, in.moser);
  {
    CheckRecord c;
    c.name = "moser_chain";
    c.pass = rep.moser_chain->pass;
    c.margin = kInf;
    for (const auto& s : rep.moser_chain->steps) c.margin = std::min(c.margin, s.ratio - (1.0 - 1e-6));
    c.constants = {{"j_max", static_cast<double>(rep.cfg.moser_j_max)},
                   {"steps", static_cast<double>(rep.moser_chain->steps.size())}};
    c.provenance = "moser_diagnostic: iterated L^{2* sigma^j} inequality, every ratio >= 1 - 1e-6";
    c.note = rep.moser_chain->note;
    rep.certificates.push_back({c, true});
  }
  if (!spec.odd) {
    double lo = kInf;
    for (double x : u.values()) lo = std::min(lo, x);
    CheckRecord c;
    c.name = "nonnegative";
    c.margin = lo + 1e-8;
    c.pass = lo >= -1e-8;
    c.constants = {{"min_u", lo}};
    c.provenance = "mpa_solve: min u >= -1e-8 outside odd mode";
    rep.certificates.push_back({c, true});
  }
  {
    // beta <= c <= d; beta is a sampled estimate, so this one only informs
    const double c_level = rep.solve->level;
    const double beta = rep.beta_rho ? rep.beta_rho->beta : kNaN;
    const double d = chain.bounds.d;
    const double slack = 1e-8 * std::max(1.0, std::abs(d));
    CheckRecord c;
    c.name = "level_bounds";
    c.margin = std::isnan(beta) ? d - c_level : std::min(c_level - beta, d - c_level);
    c.pass = c.margin >= -slack;
    c.constants = {{"beta", beta}, {"level", c_level}, {"d", d}};
    c.provenance = "estimate_beta_rho / compute_d: beta <= c <= d";
    c.note = "informational: beta comes from random directions, not a proof";
    rep.certificates.push_back({c, false});
  }

  const auto consistency = std::find_if(rep.certificates.begin(), rep.certificates.end(),
                                        [](const CertEntry& e) { return e.record.name == "consistency"; });
  rep.verdict = consistency->record.pass ? "solves-original" : "penalized-only";
}

bool gating_pass(const Report& rep) {
  return std::all_of(rep.certificates.begin(), rep.certificates.end(),
                     [](const CertEntry& e) { return !e.gating || e.record.pass; });
}

}  // namespace

Report run_pipeline(const RunConfig& cfg, Command command, const std::string& profile_path) {
  Report rep;
  rep.cfg = cfg;
  rep.command = command;
  const ProblemSpec& spec = rep.cfg.spec;
  const SampleProbe probe;
  const CheckMode mode = check_mode(cfg, command);

  if (command == Command::sweep && cfg.sweep.empty()) {
    rep.aborted = StageError{"config", "sweep needs a [sweep] table", false};
    rep.exit_code = 3;
    return rep;
  }

  stage(rep, "hypotheses", [&] {
    rep.hypotheses = check_hypotheses(spec, probe, mode, cfg.sweep);
    const auto fails = rep.hypotheses->failures();
    if (!fails.empty()) {
      std::string names;
      for (const auto& f : fails) names += (names.empty() ? "" : ", ") + f;
      throw HypothesisViolation(names, "hypotheses fail for this configuration");
    }
  });

  if (command != Command::check) {
    stage(rep, "penalize", [&] { rep.pen = std::make_unique<PenalizedNonlinearity>(spec); });
    stage(rep, "grid", [&] {
      rep.grid = std::make_unique<RadialGrid>(build_grid(spec.dimension, cfg.grid_r_max(), cfg.nodes));
    });
  }

  std::optional<DiscreteProblem> problem;
  ChainInputs chain_in;

  if (command == Command::solve) {
    std::optional<DiscreteRadialFunction> e;
    stage(rep, "endpoint", [&] {
      problem.emplace(*rep.grid, spec, *rep.pen);
      rep.endpoint_radius = endpoint_radius(spec, *rep.grid);
      rep.solve.emplace(*rep.grid);
      e = find_endpoint_e(*problem, default_bump(*rep.grid, rep.endpoint_radius));
    });
    stage(rep, "solve", [&] { rep.solve = mpa_solve(*problem, *e, cfg.solver); });
    stage(rep, "beta_rho", [&] {
      rep.beta_rho = estimate_beta_rho(*problem, cfg.beta_trials, cfg.seed, std::span(&rep.solve->u, 1));
    });
  }

  if (command == Command::certify) {
    stage(rep, "profile", [&] {
      problem.emplace(*rep.grid, spec, *rep.pen);
      SolveResult s(*rep.grid);
      s.u = read_profile_csv(profile_path, *rep.grid);
      s.level = problem->J(s.u);
      s.residual = problem->grad(s.u).residual;
      s.converged = s.residual <= cfg.solver.tol * std::max(1.0, problem->norm_E(s.u));
      s.diagnostic = "external profile " + profile_path;
      rep.solve = std::move(s);
    });
  }

  if (command != Command::check) {
    stage(rep, "constants", [&] {
      rep.floor = choose_growth_floor(spec);
      rep.dbound = compute_d(spec, default_bump(*rep.grid, spec.r0), rep.floor->c1, rep.floor->c2);
      chain_in = chain_inputs(spec, probe);
      rep.chain = constant_chain(chain_in, rep.dbound->d);
      if (rep.beta_rho) {
        rep.chain->bounds.beta = rep.beta_rho->beta;
        rep.chain->bounds.rho = rep.beta_rho->rho;
      }
      if (rep.solve) rep.chain->bounds.level = rep.solve->level;
    });
  }

  if (command == Command::solve || command == Command::certify)
    stage(rep, "certificates", [&] { run_certificates(rep, *problem, chain_in); });

  if (command != Command::check) {
    stage(rep, "thresholds", [&] {
      if (cfg.bumps > 1) rep.multi = multi_bump_D_l(chain_in, cfg.bumps, *rep.grid, *rep.floor);
      if (command == Command::sweep)
        rep.sweep = sweep_check(cfg.sweep, chain_in, rep.dbound->d, rep.multi ? rep.multi->D_l : kNaN);
    });
  }

  if (command == Command::sweep && cfg.sweep_solve) {
    stage(rep, "sweep_solve", [&] {
      rep.sweep_solves.resize(cfg.sweep.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(cfg.sweep.size()); ++j) {
        RunConfig sub = cfg;
        sub.sweep.clear();
        sub.mode = CheckMode::standard;
        sub.spec.radius_R = cfg.sweep[j].R;
        const Report r = run_pipeline(sub, Command::solve);
        SweepSolve& out = rep.sweep_solves[j];
        out.R = cfg.sweep[j].R;
        out.Lambda = cfg.sweep[j].Lambda;
        if (r.solve) {
          out.converged = r.solve->converged;
          out.level = r.solve->level;
          out.residual = r.solve->residual;
        }
        out.certified = r.exit_code == 0;
        out.verdict = r.verdict;
        if (r.aborted) out.error = r.aborted->stage + ": " + r.aborted->error;
      }
    });
  }

  if (rep.aborted) {
    rep.exit_code = rep.aborted->hypothesis ? 2 : 3;
  } else if (command == Command::solve || command == Command::certify) {
    rep.exit_code = rep.solve->converged && gating_pass(rep) ? 0 : 1;
  } else if (command == Command::sweep) {
    rep.exit_code = std::all_of(rep.sweep_solves.begin(), rep.sweep_solves.end(),
                                [](const SweepSolve& s) { return s.certified; })
                        ? 0
                        : 1;
  } else {
    rep.exit_code = 0;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json num(double v, const std::string& source) {
  json j;
  if (std::isfinite(v)) {
    j["value"] = v;
  } else {
    j["value"] = nullptr;
    j["repr"] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  j["source"] = source;
  return j;
}

json hypotheses_json(const HypothesisReport& h) {
  const std::string src = "check_hypotheses";
  json j;
  j["mode"] = h.mode == CheckMode::standard ? "standard" : h.mode == CheckMode::exponential ? "exponential" : "sweep";
  j["all_ok"] = h.all_ok();
  j["failures"] = h.failures();
  j["f1"] = {{"ok", h.f1_ok}, {"bound", num(h.f1_bound, src)}};
  j["f_hat1"] = {{"ok", h.f_hat1_ok}, {"bound", num(h.f_hat1_bound, src)}};
  j["f2"] = {{"ok", h.f2_ok}, {"margin", num(h.f2_margin, src)}};
  json f3 = {{"ok", h.f3_ok}};
  if (h.f3_witness) f3["witness"] = {num(h.f3_witness->first, src), num(h.f3_witness->second, src)};
  j["f3"] = f3;
  j["f4"] = {{"ok", h.f4_ok}};
  j["V1"] = {{"ok", h.v1_ok},
             {"case", h.v1_case == V1Case::nonnegative_with_well ? "nonnegative_with_well" : "sign_changing"},
             {"omega_measure", num(h.omega_measure, "omega_stats")},
             {"alpha", num(h.alpha, "omega_stats")},
             {"S", num(h.sobolev_S, "sobolev_constant")},
             {"margin", num(h.v1_margin, src)},
             {"v_infty", num(h.v_infty, src)},
             {"v_infty_ok", h.v12_ok}};
  j["V2"] = {{"ok", h.v2_ok}, {"inf", num(h.v2_inf, "tail_infimum")}, {"inf_over_R_power", num(h.v3_inf, src)}};
  j["V4"] = {{"ok", h.v4_ok}, {"inf", num(h.v4_inf, "tail_infimum")}};
  j["V6"] = {{"ok", h.v6_ok}, {"inf", num(h.v6_inf, "tail_infimum")}};
  json v5 = json::array();
  for (std::size_t i = 0; i < h.v5_inf.size(); ++i)
    v5.push_back({{"inf", num(h.v5_inf[i], "tail_infimum")}, {"ok", static_cast<bool>(h.v5_ok[i])}});
  j["V5"] = v5;
  j["tail_certified"] = h.tail_certified;
  j["warnings"] = h.warnings;
  return j;
}

json record_json(const CertEntry& e) {
  const CheckRecord& c = e.record;
  const std::string src = c.provenance.substr(0, c.provenance.find(':'));
  json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["gating"] = e.gating;
  j["margin"] = num(c.margin, src);
  json consts = json::object();
  for (const auto& [k, v] : c.constants) consts[k] = num(v, src);
  j["constants"] = consts;
  j["provenance"] = c.provenance;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json moser_json(const MoserConstants& m, const std::string& src) {
  return {{"u_2star", num(m.u_norm, src)}, {"tau", num(m.tau, src)},   {"tau_prime", num(m.tau_prime, src)},
          {"sigma", num(m.sigma, src)},    {"kappa", num(m.kappa, src)}, {"a3", num(m.a3, src)},
          {"a4", num(m.a4, src)},          {"C1", num(m.C1, src)},      {"C2", num(m.C2, src)},
          {"C3", num(m.C3, src)},          {"M", num(m.M, src)}};
}

json thresholds_json(const Report& rep) {
  json j = json::object();
  if (rep.floor) j["growth_floor"] = {{"c1", num(rep.floor->c1, "choose_growth_floor")},
                                      {"c2", num(rep.floor->c2, "choose_growth_floor")}};
  if (rep.dbound)
    j["d_bound"] = {{"A", num(rep.dbound->A, "compute_d")},
                    {"B", num(rep.dbound->B, "compute_d")},
                    {"t_star", num(rep.dbound->t_star, "compute_d")},
                    {"d", num(rep.dbound->d, "compute_d")},
                    {"bump_radius", num(rep.cfg.spec.r0, "default_bump")}};
  if (rep.chain) {
    const EnergyBounds& b = rep.chain->bounds;
    j["energy_bounds"] = {{"K", num(b.K, "energy_bounds")},
                          {"C_ar", num(b.C_ar, "ar_defect_constant")},
                          {"d", num(b.d, "compute_d")},
                          {"ball_R", num(b.ball_R, "ball_volume")},
                          {"norm_bound", num(b.norm_bound, "energy_bounds")},
                          {"hat_C", num(b.hat_C, "energy_bounds")},
                          {"beta", num(b.beta, "estimate_beta_rho")},
                          {"rho", num(b.rho, "estimate_beta_rho")},
                          {"level", num(b.level, "mpa_solve")}};
    j["moser_hat"] = moser_json(rep.chain->moser_hat, "moser_constants at hat_C");
    const Thresholds& t = rep.chain->thr;
    const std::string src = "thresholds";
    json tj = {{"k", num(t.k, "make_penalized")},
               {"C", num(t.C, "growth_constant_near_zero")},
               {"M_hat", num(t.M_hat, "moser_constants at hat_C")},
               {"R", num(t.R, "config")},
               {"decay_exponent", num(t.decay_exponent, src)}};
    if (rep.cfg.spec.mode == Mode::standard) {
      tj["lambda_star"] = num(t.lambda_star, src);
      tj["lambda_tilde_star"] = num(t.lambda_tilde_star, src);
      if (rep.hypotheses) {
        // the condition of the existence theorem: inf r^{(N-2)(q-2)} V >= lambda_star
        tj["V_weighted_inf"] = num(rep.hypotheses->v2_inf, "tail_infimum");
        tj["meets_lambda_star"] = rep.hypotheses->v2_inf >= t.lambda_star;
      }
    } else {
      tj["a_hat"] = num(t.a_hat, src);
      tj["mu_star"] = num(t.mu_star, src);
      tj["Lambda_star"] = num(t.Lambda_star_exp, src);
      tj["mu_hat_star"] = num(t.mu_hat_star, src);
      tj["mu"] = num(rep.cfg.spec.exp_mu, "config");
      tj["mu_within_mu_star"] = rep.cfg.spec.exp_mu <= t.mu_star;
      if (rep.hypotheses) {
        tj["V_weighted_inf"] = num(rep.hypotheses->v4_inf, "tail_infimum");
        tj["meets_Lambda_star"] = rep.hypotheses->v4_inf >= t.Lambda_star_exp;
      }
    }
    j["values"] = tj;
  }
  if (rep.multi) {
    json d = json::array();
    for (double x : rep.multi->d) d.push_back(num(x, "compute_d"));
    j["multi_bump"] = {{"l", rep.cfg.bumps},
                       {"d", d},
                       {"D_l", num(rep.multi->D_l, "multi_bump_D_l")},
                       {"lambda_star_l", num(rep.multi->lambda_star_l, "multi_bump_D_l")}};
  }
  if (rep.sweep) {
    json rows = json::array();
    for (const auto& e : rep.sweep->entries) {
      json row = {{"R", num(e.R, "config")},
                  {"Lambda", num(e.Lambda, "config")},
                  {"ratio", num(e.ratio, "sweep_check")},
                  {"lambda_star", num(e.lambda_star, "sweep_check")},
                  {"meets", e.meets}};
      if (rep.multi) {
        row["lambda_star_l"] = num(e.lambda_star_l, "sweep_check");
        row["meets_l"] = e.meets_l;
      }
      rows.push_back(row);
    }
    j["sweep"] = {{"entries", rows},
                  {"trend", rep.sweep->trend},
                  {"note", "trend over a finite window; the limsup condition itself is not decidable from it"}};
  }
  if (!rep.sweep_solves.empty()) {
    json rows = json::array();
    for (const auto& s : rep.sweep_solves) {
      json row = {{"R", num(s.R, "config")},
                  {"Lambda", num(s.Lambda, "config")},
                  {"converged", s.converged},
                  {"level", num(s.level, "mpa_solve")},
                  {"residual", num(s.residual, "mpa_solve")},
                  {"certified", s.certified},
                  {"verdict", s.verdict}};
      if (!s.error.empty()) row["error"] = s.error;
      rows.push_back(row);
    }
    j["sweep_solves"] = rows;
  }
  return j;
}

json provenance_json(const Report& rep) {
  const RunConfig& c = rep.cfg;
  json j;
  j["command"] = to_string(rep.command);
  j["config"] = c.source;
  j["seed"] = c.seed;
  j["grid"] = {{"dimension", c.spec.dimension}, {"r_max", c.grid_r_max()}, {"nodes", c.nodes}};
  if (rep.grid) j["grid"]["h"] = rep.grid->h();
  j["solver"] = {{"path_points", c.solver.m},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"step", c.solver.step},
                 {"armijo_c1", c.solver.armijo_c1},
                 {"redistribute_every", c.solver.redistribute_every},
                 {"beta_trials", c.beta_trials},
                 {"moser_j_max", c.moser_j_max}};
  j["problem"] = {{"radius_R", c.spec.radius_R},
                  {"lambda", c.spec.lambda},
                  {"q", c.spec.q},
                  {"p", c.spec.p},
                  {"theta", c.spec.theta},
                  {"a1", c.spec.a1},
                  {"a2", c.spec.a2},
                  {"s0", c.spec.s0},
                  {"r0", c.spec.r0},
                  {"odd", c.spec.odd},
                  {"mode", c.spec.mode == Mode::standard ? "standard" : "exponential"},
                  {"potential", to_string(c.spec.potential.family)},
                  {"nonlinearity", to_string(c.spec.nonlinearity.family)}};
  j["versions"] = {{"mpcert", "0.1.0"},
                   {"compiler", __VERSION__},
                   {"boost", BOOST_LIB_VERSION},
#ifdef _OPENMP
                   {"openmp", _OPENMP}
#else
                   {"openmp", 0}
#endif
  };
  return j;
}

}  // namespace

std::string report_json(const Report& rep, bool with_timings) {
  json j;
  j["status"] = {{"exit_code", rep.exit_code}, {"verdict", rep.verdict}};
  if (rep.aborted) j["status"]["aborted"] = {{"stage", rep.aborted->stage}, {"error", rep.aborted->error}};

  j["hypotheses"] = rep.hypotheses ? hypotheses_json(*rep.hypotheses) : json(nullptr);

  if (rep.solve) {
    const SolveResult& s = *rep.solve;
    json sj = {{"converged", s.converged},
               {"level", num(s.level, rep.command == Command::solve ? "mpa_solve" : "energy_J")},
               {"residual", num(s.residual, rep.command == Command::solve ? "mpa_solve" : "grad_J")},
               {"iterations", s.iterations},
               {"nonnegative", s.nonnegative},
               {"sup_u", num(rep.grid ? lp_norm(*rep.grid, s.u, kInf) : kNaN, "lp_norm")},
               {"endpoint_bump_radius", num(rep.endpoint_radius, "find_endpoint_e")}};
    if (rep.beta_rho)
      sj["beta_rho"] = {{"beta", num(rep.beta_rho->beta, "estimate_beta_rho")},
                        {"rho", num(rep.beta_rho->rho, "estimate_beta_rho")},
                        {"found", rep.beta_rho->found},
                        {"warning", rep.beta_rho->warning}};
    if (!s.diagnostic.empty()) sj["diagnostic"] = s.diagnostic;
    j["solve"] = sj;
  } else {
    j["solve"] = nullptr;
  }

  json cj = json::object();
  json recs = json::array();
  for (const auto& e : rep.certificates) recs.push_back(record_json(e));
  cj["records"] = recs;
  if (rep.moser_u) cj["moser_at_u"] = moser_json(*rep.moser_u, "moser_constants at |u|_{2*}");
  if (rep.moser_chain) {
    json steps = json::array();
    for (const auto& s : rep.moser_chain->steps)
      steps.push_back({{"j", s.j},
                       {"log_lhs", num(s.log_lhs, "moser_diagnostic")},
                       {"log_rhs", num(s.log_rhs, "moser_diagnostic")},
                       {"ratio", num(s.ratio, "moser_diagnostic")},
                       {"pass", s.pass}});
    cj["moser_chain"] = {{"pass", rep.moser_chain->pass},
                         {"truncated", rep.moser_chain->truncated},
                         {"steps", steps},
                         {"note", rep.moser_chain->note}};
  }
  cj["verdict"] = rep.verdict;
  j["certificates"] = cj;

  j["thresholds"] = thresholds_json(rep);
  j["provenance"] = provenance_json(rep);

  if (with_timings) {
    json t = json::object();
    for (const auto& [name, sec] : rep.timings) {
      const std::string key = t.contains(name) ? name + "_2" : name;
      t[key] = num(sec, "wall clock");
    }
    j["timings"] = t;
  } else {
    j["timings"] = {{"recorded", false}, {"note", "rerun with --timings; left out to keep reruns byte-identical"}};
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

std::string profile_csv(const Report& rep) {
  if (!rep.solve || !rep.grid) return {};
  const RadialGrid& grid = *rep.grid;
  const ProblemSpec& spec = rep.cfg.spec;
  const Potential V = spec.V();
  const Nonlinearity f = spec.f();
  const DiscreteRadialFunction& u = rep.solve->u;
  const double M = rep.moser_u ? rep.moser_u->M : kNaN;
  const double e = spec.dimension - 2.0;

  std::string out = "r,u,V,f_of_u,g_of_u,decay_bound\n";
  char buf[160];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    const double gu = rep.pen ? rep.pen->g(r, u[i]) : kNaN;
    int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,", r, u[i], V(r), f(r, u[i]), gu);
    out.append(buf, static_cast<std::size_t>(n));
    if (r >= spec.radius_R && !std::isnan(M)) {
      n = std::snprintf(buf, sizeof buf, "%.17g", M * std::pow(spec.radius_R / r, e));
      out.append(buf, static_cast<std::size_t>(n));
    }
    out += '\n';
  }
  return out;
}

void write_outputs(const Report& rep, const std::string& dir, bool with_timings) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto put = [](const fs::path& p, const std::string& text) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << text;
    if (!o) throw std::runtime_error("write failed for " + p.string());
  };
  put(fs::path(dir) / "report.json", report_json(rep, with_timings));
  const std::string csv = profile_csv(rep);
  if (!csv.empty()) put(fs::path(dir) / "profile.csv", csv);
}

DiscreteRadialFunction read_profile_csv(const std::string& path, const RadialGrid& grid) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open profile '" + path + "'");
  const auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError(path + ": empty profile");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw PreconditionError(path + ": no '" + std::string(name) + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cr = col("r"), cu = col("u");

  const auto parse = [&](const std::string& s, int lineno) {
    double x = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || end != s.data() + s.size())
      throw PreconditionError(path + ":" + std::to_string(lineno) + ": '" + s + "' is not a number");
    return x;
  };

  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() <= std::max(cr, cu)) throw PreconditionError(path + ":" + std::to_string(lineno) + ": short row");
    const std::size_t i = values.size();
    if (i >= grid.size()) throw PreconditionError(path + ": more rows than grid nodes");
    const double r = parse(cells[cr], lineno);
    if (std::abs(r - grid.r(i)) > 1e-9 * std::max(1.0, grid.r(i)))
      throw PreconditionError(path + ":" + std::to_string(lineno) + ": r = " + cells[cr] +
                              " does not match grid node " + std::to_string(grid.r(i)));
    values.push_back(parse(cells[cu], lineno));
  }
  if (values.size() != grid.size())
    throw PreconditionError(path + ": " + std::to_string(values.size()) + " rows for " +
                            std::to_string(grid.size()) + " grid nodes");
  return DiscreteRadialFunction(grid, std::move(values));
}

}  // namespace mpcert
