// mpcert: mountain-pass solver and certificate checker for radial
// -Lap u + V(|x|) u = f(|x|, u) with vanishing potentials.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mpcert/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> mesh;
  std::optional<double> rmax;
  bool timings = false;
  std::string profile;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "TOML config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (default: [output] dir)");
  sub->add_option("--seed", o.seed, "seed for the random directions of beta/rho");
  sub->add_option("--mesh", o.mesh, "number of grid cells M")->check(CLI::Range(16, 100000000));
  sub->add_option("--rmax", o.rmax, "outer radius of the grid")->check(CLI::PositiveNumber);
  sub->add_flag("--timings", o.timings, "record wall-clock stage timings in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpcert: radial mountain-pass solutions with explicit a posteriori certificates"};
  app.require_subcommand(1);
  Overrides o;

  auto* check = app.add_subcommand("check", "check the hypotheses only");
  auto* thresholds = app.add_subcommand("thresholds", "evaluate the constant chain and thresholds");
  auto* solve = app.add_subcommand("solve", "solve, certify and evaluate thresholds");
  auto* certify = app.add_subcommand("certify", "certify an external CSV profile");
  auto* sweep = app.add_subcommand("sweep", "threshold comparisons over the [sweep] table");
  for (auto* s : {check, thresholds, solve, certify, sweep}) add_common(s, o);
  certify->add_option("--profile", o.profile, "CSV with r,u columns on the config's grid")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  mpcert::Command cmd = mpcert::Command::solve;
  for (auto* s : app.get_subcommands()) cmd = mpcert::command_from_string(s->get_name());

  mpcert::RunConfig cfg;
  try {
    cfg = mpcert::parse_config(o.config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  }
  if (o.out) cfg.out_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.mesh) cfg.nodes = *o.mesh;
  if (o.rmax) {
    if (!(*o.rmax > cfg.spec.radius_R)) {
      std::cerr << "config error: --rmax must exceed problem.radius_R\n";
      return 4;
    }
    cfg.r_max = *o.rmax;
  }

  const mpcert::Report rep = mpcert::run_pipeline(cfg, cmd, o.profile);
  try {
    mpcert::write_outputs(rep, cfg.out_dir, o.timings);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 5;
  }

  if (rep.aborted) std::cerr << "aborted at stage " << rep.aborted->stage << ": " << rep.aborted->error << "\n";
  if (rep.solve)
    std::printf("level %.12g  residual %.3e  iterations %d  converged %s\n", rep.solve->level, rep.solve->residual,
                rep.solve->iterations, rep.solve->converged ? "yes" : "no");
  for (const auto& c : rep.certificates)
    std::printf("%-14s %s%s\n", c.record.name.c_str(), c.record.pass ? "pass" : "FAIL", c.gating ? "" : " (info)");
  if (rep.chain && cfg.spec.mode == mpcert::Mode::standard)
    std::printf("lambda_star %.12g  lambda_tilde_star %.12g\n", rep.chain->thr.lambda_star,
                rep.chain->thr.lambda_tilde_star);
  if (rep.sweep) std::printf("sweep trend: %s\n", rep.sweep->trend.c_str());
  if (!rep.verdict.empty()) std::printf("verdict: %s\n", rep.verdict.c_str());
  std::printf("report: %s/report.json  exit %d\n", cfg.out_dir.c_str(), rep.exit_code);
  return rep.exit_code;
}
