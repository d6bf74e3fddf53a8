#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpcert/certificates.hpp"
#include "mpcert/config.hpp"
#include "mpcert/hypotheses.hpp"
#include "mpcert/mountain_pass.hpp"

namespace mpcert {

enum class Command { check, thresholds, solve, certify, sweep };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

struct StageError {
  std::string stage;
  std::string error;
  bool hypothesis = false;
};

struct CertEntry {
  CheckRecord record;
  bool gating = true;  // informational records never change the exit code
};

/// One (R_j, Lambda_j) row solved end to end in sweep mode.
struct SweepSolve {
  double R = kNaN;
  double Lambda = kNaN;
  bool converged = false;
  double level = kNaN;
  double residual = kNaN;
  bool certified = false;
  std::string verdict;
  std::string error;
};

/// Everything one run produced. Members stay empty for stages that did not run.
struct Report {
  RunConfig cfg;
  Command command = Command::solve;

  std::optional<HypothesisReport> hypotheses;
  std::unique_ptr<RadialGrid> grid;
  std::unique_ptr<PenalizedNonlinearity> pen;

  double endpoint_radius = kNaN;  // radius of the bump that produced e
  std::optional<SolveResult> solve;
  std::optional<BetaRho> beta_rho;

  std::optional<GrowthFloor> floor;
  std::optional<DBound> dbound;
  std::optional<Chain> chain;
  std::optional<MoserConstants> moser_u;  // at |u|_{2*}
  std::vector<CertEntry> certificates;
  std::optional<MoserChain> moser_chain;
  std::optional<MultiBump> multi;
  std::optional<SweepReport> sweep;
  std::vector<SweepSolve> sweep_solves;

  std::string verdict;  // "solves-original", "penalized-only" or empty
  std::optional<StageError> aborted;
  std::vector<std::pair<std::string, double>> timings;
  int exit_code = 0;

  Report();
  Report(Report&&) noexcept;
  Report& operator=(Report&&) noexcept;
  ~Report();
};

/// Runs the stages `command` needs. Never throws for stage failures: they end
/// up in `aborted` with exit code 2 (hypotheses) or 3 (anything else).
/// `profile_csv` is the external profile for Command::certify.
Report run_pipeline(const RunConfig& cfg, Command command, const std::string& profile_csv = "");

/// JSON text of the report; timings are included only on request so that
/// reruns stay byte-identical.
std::string report_json(const Report& rep, bool with_timings = false);

/// r,u,V,f_of_u,g_of_u,decay_bound with 17 significant digits; empty when
/// there is no profile.
std::string profile_csv(const Report& rep);

/// Writes report.json (and profile.csv when a profile exists) into dir.
void write_outputs(const Report& rep, const std::string& dir, bool with_timings = false);

/// Reads the u column of a profile CSV; the r column must match the grid nodes.
DiscreteRadialFunction read_profile_csv(const std::string& path, const RadialGrid& grid);

}  // namespace mpcert
