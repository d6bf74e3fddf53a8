#include "mpcert/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace mpcert {

namespace toml {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::string& name) : s_(text), name_(name) {}

  Table document() {
    Table root;
    Table* current = &root;
    std::string current_name;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_space();
        const std::string key = bare_key();
        skip_space();
        expect(']');
        end_of_line();
        if (root.count(key)) fail("table [" + key + "] defined twice");
        Value v;
        v.v = std::make_shared<Table>();
        v.line = line_;
        current = std::get<std::shared_ptr<Table>>(root.emplace(key, std::move(v)).first->second.v).get();
        current_name = key;
        continue;
      }
      const int at = line_;
      const std::string key = bare_key();
      skip_space();
      expect('=');
      skip_space();
      Value v = value();
      v.line = at;
      end_of_line();
      if (current->count(key))
        fail((current_name.empty() ? "" : current_name + ".") + key + " assigned twice");
      current->emplace(key, std::move(v));
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("", name_ + ":" + std::to_string(line_) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }

  // whitespace, comments and newlines inside arrays / inline tables
  void skip_layout() { skip_blank_lines(); }

  void end_of_line() {
    skip_space();
    skip_comment();
    if (!eof() && peek() != '\n' && peek() != '\r') fail("unexpected text after value");
    newline();
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  Value value() {
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      v.v = string();
    } else if (c == '{') {
      v.v = inline_table();
    } else if (c == '[') {
      v.v = array();
    } else if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      v.v = true;
    } else if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      v.v = false;
    } else {
      const std::size_t start = pos_;
      while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || std::string("+-.eE").find(peek()) != std::string::npos))
        ++pos_;
      const std::string tok = s_.substr(start, pos_ - start);
      if (tok.empty()) fail("expected a value");
      double x = 0.0;
      const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
      const auto [end, ec] = std::from_chars(b, tok.data() + tok.size(), x);
      if (ec != std::errc() || end != tok.data() + tok.size()) fail("'" + tok + "' is not a decimal number");
      v.v = x;
      v.integral = tok.find_first_of(".eE") == std::string::npos;
    }
    return v;
  }

  std::string string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::shared_ptr<Table> inline_table() {
    expect('{');
    auto t = std::make_shared<Table>();
    skip_layout();
    if (peek() == '}') {
      ++pos_;
      return t;
    }
    while (true) {
      skip_layout();
      const int at = line_;
      const std::string key = bare_key();
      skip_space();
      expect('=');
      skip_space();
      Value v = value();
      v.line = at;
      if (t->count(key)) fail(key + " assigned twice");
      t->emplace(key, std::move(v));
      skip_layout();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return t;
    }
  }

  std::shared_ptr<Array> array() {
    expect('[');
    auto a = std::make_shared<Array>();
    while (true) {
      skip_layout();
      if (peek() == ']') {
        ++pos_;
        return a;
      }
      a->push_back(value());
      skip_layout();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_layout();
      expect(']');
      return a;
    }
  }

  const std::string& s_;
  std::string name_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Table parse(const std::string& text, const std::string& name) { return Parser(text, name).document(); }

}  // namespace toml

// ---------------------------------------------------------------------------

namespace {

// Reads typed entries out of one table and remembers which keys were used,
// so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::Table* t, std::string path, std::string file) : t_(t), path_(std::move(path)), file_(std::move(file)) {}

  bool has(const std::string& key) const { return t_ && t_->count(key); }

  const toml::Value* get(const std::string& key) {
    used_.insert(key);
    if (!t_) return nullptr;
    const auto it = t_->find(key);
    return it == t_->end() ? nullptr : &it->second;
  }

  std::string where(const std::string& key, const toml::Value* v) const {
    return path_ + key + (v ? " (" + file_ + ":" + std::to_string(v->line) + ")" : "");
  }

  void number(const std::string& key, double& out, bool required = false) {
    const toml::Value* v = get(key);
    if (!v) {
      if (required) throw ConfigError(path_ + key, "missing mandatory key");
      return;
    }
    if (!std::holds_alternative<double>(v->v)) throw ConfigError(where(key, v), "expected a number");
    out = std::get<double>(v->v);
  }

  void integer(const std::string& key, int& out, bool required = false) {
    const toml::Value* v = get(key);
    if (!v) {
      if (required) throw ConfigError(path_ + key, "missing mandatory key");
      return;
    }
    if (!std::holds_alternative<double>(v->v) || !v->integral) throw ConfigError(where(key, v), "expected an integer");
    const double x = std::get<double>(v->v);
    if (std::abs(x) > 2e9) throw ConfigError(where(key, v), "integer out of range");
    out = static_cast<int>(x);
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    const toml::Value* v = get(key);
    if (!v) return;
    if (!std::holds_alternative<double>(v->v) || !v->integral || std::get<double>(v->v) < 0.0)
      throw ConfigError(where(key, v), "expected a nonnegative integer");
    out = static_cast<std::uint64_t>(std::get<double>(v->v));
  }

  void boolean(const std::string& key, bool& out) {
    const toml::Value* v = get(key);
    if (!v) return;
    if (!std::holds_alternative<bool>(v->v)) throw ConfigError(where(key, v), "expected true or false");
    out = std::get<bool>(v->v);
  }

  void string(const std::string& key, std::string& out, bool required = false) {
    const toml::Value* v = get(key);
    if (!v) {
      if (required) throw ConfigError(path_ + key, "missing mandatory key");
      return;
    }
    if (!std::holds_alternative<std::string>(v->v)) throw ConfigError(where(key, v), "expected a string");
    out = std::get<std::string>(v->v);
  }

  Section table(const std::string& key, bool required = false) {
    const toml::Value* v = get(key);
    if (!v) {
      if (required) throw ConfigError(path_ + key, "missing mandatory key");
      return Section(nullptr, path_ + key + ".", file_);
    }
    if (!std::holds_alternative<std::shared_ptr<toml::Table>>(v->v))
      throw ConfigError(where(key, v), "expected a table");
    return Section(std::get<std::shared_ptr<toml::Table>>(v->v).get(), path_ + key + ".", file_);
  }

  void reject_unknown() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_)
      if (!used_.count(k)) throw ConfigError(where(k, &v), "unknown key");
  }

  const toml::Table* raw() const { return t_; }
  const std::string& path() const { return path_; }

 private:
  const toml::Table* t_;
  std::string path_;
  std::string file_;
  std::set<std::string> used_;
};

PotentialParams read_potential(Section s) {
  PotentialParams P;
  std::string family;
  s.string("family", family, true);
  try {
    P.family = potential_family_from_string(family);
  } catch (const std::exception& e) {
    throw ConfigError(s.path() + "family", "unknown potential family '" + family + "'");
  }
  s.number("amplitude", P.amplitude);
  s.number("gamma", P.gamma);
  s.number("depth", P.depth);
  s.number("width", P.width);
  s.number("rate", P.rate);
  s.number("power", P.power);
  s.number("c0", P.c0);
  s.number("c2", P.c2);
  s.reject_unknown();
  return P;
}

NonlinearityParams read_nonlinearity(Section s) {
  NonlinearityParams P;
  std::string family;
  s.string("family", family, true);
  try {
    P.family = nonlinearity_family_from_string(family);
  } catch (const std::exception& e) {
    throw ConfigError(s.path() + "family", "unknown nonlinearity family '" + family + "'");
  }
  s.number("c1", P.c1);
  s.number("gamma1", P.gamma1);
  s.number("c2", P.c2);
  s.number("gamma2", P.gamma2);
  s.number("modulation", P.modulation);
  s.number("exponent", P.exponent);
  s.number("decay", P.decay);
  s.number("order", P.order);
  s.reject_unknown();
  return P;
}

}  // namespace

double RunConfig::grid_r_max() const {
  return std::isnan(r_max) ? std::max(10.0, 10.0 * spec.radius_R) : r_max;
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  const toml::Table root = toml::parse(text, name);
  Section top(&root, "", name);
  RunConfig cfg;
  cfg.source = name;

  {
    Section p = top.table("problem", true);
    ProblemSpec& s = cfg.spec;
    p.integer("dimension", s.dimension, true);
    s.potential = read_potential(p.table("potential", true));
    s.nonlinearity = read_nonlinearity(p.table("nonlinearity", true));
    p.number("q", s.q, true);
    p.number("p", s.p, true);
    p.number("a1", s.a1, true);
    p.number("a2", s.a2);
    p.number("theta", s.theta, true);
    p.number("s0", s.s0);
    p.number("radius_R", s.radius_R, true);
    p.number("lambda", s.lambda, true);
    p.number("r0", s.r0);
    p.number("v_infty", s.v_infty);
    p.boolean("odd", s.odd);
    std::string mode = "standard";
    p.string("mode", mode);
    if (mode == "standard")
      s.mode = Mode::standard;
    else if (mode == "exponential")
      s.mode = Mode::exponential;
    else
      throw ConfigError("problem.mode", "expected \"standard\" or \"exponential\"");
    p.reject_unknown();
    try {
      s.validate();
    } catch (const DomainError& e) {
      const std::string what = e.what();
      const auto colon = what.find(':');
      throw ConfigError(colon == std::string::npos ? "problem" : what.substr(0, colon),
                        colon == std::string::npos ? what : what.substr(colon + 2));
    }
  }
  {
    Section e = top.table("exponential");
    e.number("a", cfg.spec.exp_a);
    e.number("mu", cfg.spec.exp_mu);
    e.reject_unknown();
    if (!(cfg.spec.exp_a > 0.0)) throw ConfigError("exponential.a", "must be > 0");
    if (!(cfg.spec.exp_mu > 0.0)) throw ConfigError("exponential.mu", "must be > 0");
  }
  {
    Section g = top.table("grid");
    g.number("r_max", cfg.r_max);
    g.integer("nodes", cfg.nodes);
    g.reject_unknown();
    if (!std::isnan(cfg.r_max) && !(cfg.r_max > cfg.spec.radius_R))
      throw ConfigError("grid.r_max", "must exceed problem.radius_R");
    if (cfg.nodes < 16) throw ConfigError("grid.nodes", "must be >= 16");
  }
  {
    Section v = top.table("solver");
    v.integer("path_points", cfg.solver.m);
    v.number("tol", cfg.solver.tol);
    v.integer("max_iter", cfg.solver.max_iter);
    v.number("step", cfg.solver.step);
    v.unsigned64("seed", cfg.seed);
    v.integer("beta_trials", cfg.beta_trials);
    v.integer("moser_j_max", cfg.moser_j_max);
    v.reject_unknown();
    if (cfg.solver.m < 8) throw ConfigError("solver.path_points", "must be >= 8");
    if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be > 0");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
    if (!(cfg.solver.step > 0.0)) throw ConfigError("solver.step", "must be > 0");
    if (cfg.beta_trials < 8) throw ConfigError("solver.beta_trials", "must be >= 8");
    if (cfg.moser_j_max < 1 || cfg.moser_j_max > 5) throw ConfigError("solver.moser_j_max", "must be in 1..5");
  }
  {
    Section w = top.table("sweep");
    if (const toml::Value* t = w.get("table")) {
      if (!std::holds_alternative<std::shared_ptr<toml::Array>>(t->v))
        throw ConfigError(w.where("table", t), "expected an array of [R, Lambda] pairs");
      for (const auto& row : *std::get<std::shared_ptr<toml::Array>>(t->v)) {
        const auto* pr = std::get_if<std::shared_ptr<toml::Array>>(&row.v);
        if (!pr || (*pr)->size() != 2 || !std::holds_alternative<double>((**pr)[0].v) ||
            !std::holds_alternative<double>((**pr)[1].v))
          throw ConfigError(w.where("table", &row), "each entry must be [R, Lambda]");
        const SweepPair sp{std::get<double>((**pr)[0].v), std::get<double>((**pr)[1].v)};
        if (!(sp.R > 0.0) || !(sp.Lambda > 0.0)) throw ConfigError(w.where("table", &row), "R and Lambda must be > 0");
        if (!cfg.sweep.empty() && !(sp.R > cfg.sweep.back().R))
          throw ConfigError(w.where("table", &row), "R_j must be strictly increasing");
        cfg.sweep.push_back(sp);
      }
    }
    w.boolean("solve", cfg.sweep_solve);
    w.integer("l", cfg.bumps);
    w.reject_unknown();
    if (cfg.bumps < 1) throw ConfigError("sweep.l", "must be >= 1");
    if (!cfg.sweep.empty()) cfg.mode = CheckMode::sweep;
  }
  {
    Section o = top.table("output");
    o.string("dir", cfg.out_dir);
    o.reject_unknown();
  }
  if (cfg.mode != CheckMode::sweep && cfg.spec.mode == Mode::exponential) cfg.mode = CheckMode::exponential;
  top.reject_unknown();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace mpcert
