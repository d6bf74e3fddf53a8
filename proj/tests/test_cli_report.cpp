#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "mpcert/config.hpp"
#include "mpcert/pipeline.hpp"

using namespace mpcert;
using doctest::Approx;

namespace {

const char* kMinimal = R"(
[problem]
dimension = 3
potential = { family = "inverse_power", gamma = 1.0 }
nonlinearity = { family = "power", c1 = 1.0, gamma1 = 3.0 }
q = 3.0
p = 3.0
a1 = 1.0
theta = 3.0
radius_R = 1.0
lambda = 1.0
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "t.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_p1() {
  RunConfig c = parse_config_text(with("[grid]\nr_max = 10.0\nnodes = 600\n"), "small");
  c.spec.r0 = 0.9;
  return c;
}

}  // namespace

TEST_SUITE("cli_report") {

TEST_CASE("toml subset") {
  const auto t = toml::parse(R"(# comment
top = 1
[a]
x = -2.5e-3   # trailing
s = "q\"uote"
b = true
arr = [ [1, 2.0],
        [3, 4], ]
inl = { k = 1, m = "z" }
)");
  CHECK(std::get<double>(t.at("top").v) == 1.0);
  CHECK(t.at("top").integral);
  const auto& a = *std::get<std::shared_ptr<toml::Table>>(t.at("a").v);
  CHECK(std::get<double>(a.at("x").v) == -2.5e-3);
  CHECK_FALSE(a.at("x").integral);
  CHECK(std::get<std::string>(a.at("s").v) == "q\"uote");
  CHECK(std::get<bool>(a.at("b").v));
  CHECK(std::get<std::shared_ptr<toml::Array>>(a.at("arr").v)->size() == 2);
  CHECK(a.at("arr").line == 7);
  CHECK_THROWS_AS(toml::parse("x = \"open\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("x = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("x = 0x10\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("x = 1 y\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("[a]\n[a]\n"), ConfigError);
}

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config_text(kMinimal);
  CHECK(c.spec.dimension == 3);
  CHECK(c.spec.a2 == 0.0);
  CHECK(c.spec.s0 == 0.0);
  CHECK(c.spec.r0 == 0.5);
  CHECK(c.nodes == 2000);
  CHECK(c.grid_r_max() == 10.0);
  CHECK(c.solver.m == 64);
  CHECK(c.solver.tol == 1e-8);
  CHECK(c.solver.max_iter == 5000);
  CHECK(c.seed == 42);
  CHECK(c.out_dir == "out");
  CHECK(std::isnan(c.spec.potential.amplitude));
}

TEST_CASE("config errors name the key") {
  std::string e = error_of(std::string(kMinimal).replace(std::string(kMinimal).find("p = 3.0"), 7, "p = 7.0"));
  CHECK(e.find("problem.p") != std::string::npos);
  e = error_of(with("[sweep]\ntable = [[1.0, 1.0], [1.0, 2.0]]\n"));
  CHECK(e.find("sweep.table") != std::string::npos);
  CHECK(e.find("increasing") != std::string::npos);
  e = error_of(with("[grid]\nnodez = 10\n"));
  CHECK(e.find("grid.nodez") != std::string::npos);
  CHECK(e.find("t.toml:") != std::string::npos);
  e = error_of(with("colour = 1\n"));
  CHECK(e.find("problem.colour") != std::string::npos);
  e = error_of("[problem]\ndimension = 3\n");
  CHECK(e.find("missing") != std::string::npos);
  e = error_of(std::string(kMinimal).replace(std::string(kMinimal).find("inverse_power"), 13, "bogus"));
  CHECK(e.find("problem.potential.family") != std::string::npos);
  e = error_of(with("[solver]\npath_points = 4\n"));
  CHECK(e.find("solver.path_points") != std::string::npos);
  e = error_of(with("[grid]\nnodes = 20.5\n"));
  CHECK(e.find("grid.nodes") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/x.toml"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : std::filesystem::directory_iterator(MPCERT_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(entry.path().string()));
  }
}

TEST_CASE("check and thresholds commands") {
  const RunConfig c = small_p1();
  const Report chk = run_pipeline(c, Command::check);
  CHECK(chk.exit_code == 0);
  CHECK(chk.hypotheses.has_value());
  CHECK_FALSE(chk.solve.has_value());
  const Report thr = run_pipeline(c, Command::thresholds);
  CHECK(thr.exit_code == 0);
  REQUIRE(thr.chain.has_value());
  CHECK(thr.chain->thr.lambda_star > 0.0);

  RunConfig bad = c;
  bad.spec.nonlinearity.c2 = -1.0;
  bad.spec.nonlinearity.gamma2 = 5.0;
  const Report ab = run_pipeline(bad, Command::solve);
  CHECK(ab.exit_code == 2);
  REQUIRE(ab.aborted.has_value());
  CHECK(ab.aborted->stage == "hypotheses");
  const auto j = nlohmann::json::parse(report_json(ab));
  CHECK(j["status"]["aborted"]["stage"] == "hypotheses");
  for (const char* key : {"hypotheses", "solve", "certificates", "thresholds", "provenance", "timings"})
    CHECK(j.contains(key));
}

TEST_CASE("solve, outputs and determinism") {
  namespace fs = std::filesystem;
  const RunConfig c = small_p1();
  const Report a = run_pipeline(c, Command::solve);
  REQUIRE(a.solve.has_value());
  CHECK(a.solve->converged);
  CHECK_FALSE(a.verdict.empty());
  const fs::path d1 = fs::temp_directory_path() / "mpcert_test_a", d2 = fs::temp_directory_path() / "mpcert_test_b";
  write_outputs(a, d1.string());
  const Report b = run_pipeline(c, Command::solve);
  write_outputs(b, d2.string());
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "profile.csv") == slurp(d2 / "profile.csv"));

  // every number carries its source
  const auto j = nlohmann::json::parse(slurp(d1 / "report.json"));
  std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& n) {
    if (n.is_object()) {
      if (n.contains("value")) CHECK(n.contains("source"));
      for (const auto& [k, v] : n.items()) walk(v);
    } else if (n.is_array()) {
      for (const auto& v : n) walk(v);
    }
  };
  walk(j["certificates"]);
  walk(j["thresholds"]);
  walk(j["solve"]);
  CHECK(j["provenance"]["seed"] == 42);

  // CSV: header, 17 digits, decay column above |u| past R
  std::istringstream csv(slurp(d1 / "profile.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "r,u,V,f_of_u,g_of_u,decay_bound");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const double r = std::stod(cells[0]), u = std::stod(cells[1]);
    if (r < c.spec.radius_R) {
      CHECK(cells.size() == 5);
    } else {
      REQUIRE(cells.size() == 6);
      CHECK(std::stod(cells[5]) >= std::abs(u));
    }
    ++rows;
  }
  CHECK(rows == a.grid->size());

  // certify reads the profile back and reaches the same records
  const Report cert = run_pipeline(c, Command::certify, (d1 / "profile.csv").string());
  REQUIRE_FALSE(cert.aborted.has_value());
  CHECK(cert.solve->level == Approx(a.solve->level).epsilon(1e-14));
  REQUIRE(cert.certificates.size() == a.certificates.size());
  for (std::size_t i = 0; i < a.certificates.size(); ++i)
    CHECK(cert.certificates[i].record.pass == a.certificates[i].record.pass);

  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("certify rejects a profile on another grid; zero profile") {
  namespace fs = std::filesystem;
  const RunConfig c = small_p1();
  const fs::path p = fs::temp_directory_path() / "mpcert_bad.csv";
  {
    std::ofstream o(p);
    o << "r,u\n0,1\n0.5,0\n";
  }
  const Report r = run_pipeline(c, Command::certify, p.string());
  CHECK(r.exit_code == 3);
  CHECK(r.aborted->stage == "profile");

  {
    std::ofstream o(p);
    o << "r,u\n" << std::setprecision(17);
    const double h = c.grid_r_max() / c.nodes;
    for (int i = 0; i <= c.nodes; ++i) o << i * h << ",0\n";
  }
  const Report z = run_pipeline(c, Command::certify, p.string());
  REQUIRE_FALSE(z.aborted.has_value());
  CHECK(z.solve->level == 0.0);
  const std::string csv = profile_csv(z);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) CHECK(line.substr(line.find(',') + 1, 2) == "0,");
  fs::remove(p);
}

TEST_CASE("sweep command") {
  RunConfig c = parse_config_text(with("[sweep]\ntable = [[1.5, 1.0], [2.0, 4.0], [3.0, 9.0], [4.0, 16.0]]\n"));
  const Report r = run_pipeline(c, Command::sweep);
  CHECK(r.exit_code == 0);
  REQUIRE(r.sweep.has_value());
  CHECK(r.sweep->entries.size() == 4);
  CHECK(r.sweep->trend == "unbounded");
  RunConfig empty = parse_config_text(kMinimal);
  CHECK(run_pipeline(empty, Command::sweep).exit_code == 3);
}

}  // TEST_SUITE
