#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mpcert/hypotheses.hpp"
#include "mpcert/mountain_pass.hpp"

namespace mpcert {

/// Bad configuration; `key` is the dotted path of the offending entry.
struct ConfigError : std::runtime_error {
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key(std::move(key)) {}
  std::string key;
};

// ---------------------------------------------------------------------------
// the TOML subset: [tables], key = value, numbers, strings, booleans,
// inline tables and (nested) arrays, # comments

namespace toml {

struct Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, std::shared_ptr<Table>, std::shared_ptr<Array>> v;
  int line = 0;
  bool integral = false;  // written without fraction or exponent
};

/// Throws ConfigError with "<name>:<line>" locations.
Table parse(const std::string& text, const std::string& name = "<config>");

}  // namespace toml

// ---------------------------------------------------------------------------

struct RunConfig {
  ProblemSpec spec;
  double r_max = kNaN;  // NaN: max(10, 10 R)
  int nodes = 2000;
  MpaOptions solver;
  std::uint64_t seed = 42;
  int beta_trials = 32;
  int moser_j_max = 4;
  CheckMode mode = CheckMode::standard;
  std::vector<SweepPair> sweep;
  bool sweep_solve = false;
  int bumps = 1;  // l of the multi-bump threshold
  std::string out_dir = "out";
  std::string source;

  double grid_r_max() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name = "<config>");

}  // namespace mpcert
