#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "holoquad/errors.hpp"
#include "holoquad/io/cli.hpp"
#include "holoquad/io/config.hpp"

using namespace holoquad;
using namespace holoquad::io;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "holoquad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return std::string(HOLOQUAD_CONFIG_DIR) + "/" + name; }

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "holoquad_cli_test";
  fs::create_directories(p);
  return p;
}

std::string write_cfg(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const RunConfig c = parse("# comment\na = [0, 1, 0, 1]\nb = [0,0,1,1]  # trailing\n"
                            "epsilons = [0.01, 0.1, 0.05]\ndelta = 0.15\ngrid = [32, 9]\n"
                            "output = out/run\nformat = jsonl\nsvg = true\n");
  CHECK(c.sections.a[1] == 1);
  CHECK(c.sections.b[3] == 1);
  CHECK(c.epsilons == std::vector<double>{0.1, 0.05, 0.01});
  CHECK(*c.delta == 0.15);
  CHECK(c.grid.n_tau == 32);
  CHECK(c.grid.n_sigma == 9);
  CHECK(c.output == "out/run");
  CHECK(c.format == "jsonl");
  CHECK(c.emit_svg);

  const RunConfig d = parse("a = [0, 1, 0, 1]\nb = [0, 0, 1, 1]\n");
  CHECK(d.epsilons == std::vector<double>{0.1});
  CHECK_FALSE(d.delta.has_value());
  CHECK(d.format == "csv");
}

TEST_CASE("config errors") {
  const std::string ab = "a = [0, 1, 0, 1]\nb = [0, 0, 1, 1]\n";
  for (const std::string& bad : {std::string("a = [0, 1, 0, 1]\n"), ab + "a = [1, 2, 3, 4]\n", ab + "colour = red\n",
                                 std::string("a = [0, 1, 0]\nb = [0, 0, 1, 1]\n"),
                                 std::string("a = [0, x, 0, 1]\nb = [0, 0, 1, 1]\n"), ab + "epsilons = [0.1, 1e-7]\n",
                                 ab + "epsilons = [2]\n", ab + "delta = 0.5\n", ab + "grid = [1, 9]\n",
                                 ab + "grid = [8]\n", ab + "format = xml\n", ab + "svg = maybe\n", ab + "no equals\n"})
    CHECK_THROWS_AS(parse(bad), ConfigError);
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/holoquad.cfg"), doctest::Contains("cannot open"), ConfigError);
}

TEST_CASE("complex arguments") {
  using C = std::complex<double>;
  CHECK(parse_complex("0.3+0.2i") == C(0.3, 0.2));
  CHECK(parse_complex("0.3 - 0.2i") == C(0.3, -0.2));
  CHECK(parse_complex("2") == C(2, 0));
  CHECK(parse_complex("-1.5i") == C(0, -1.5));
  CHECK(parse_complex("i") == C(0, 1));
  CHECK(parse_complex("1e-3+2e-3j") == C(1e-3, 2e-3));
  CHECK(parse_complex("0.5,0.25") == C(0.5, 0.25));
  CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
  CHECK_THROWS_AS(parse_complex(""), ConfigError);
}

TEST_CASE("classify") {
  const Run p = run({"classify", "--config", cfg("parallelogram.cfg")});
  CHECK(p.code == kOk);
  CHECK(p.out.find("row: p4<p1=p3<p2; shape: (a); degenerate_axis: 0") != std::string::npos);
  const Run b = run({"classify", "--config", cfg("tree_b.cfg")});
  CHECK(b.code == kOk);
  CHECK(b.out.find("shape: (b)") != std::string::npos);
  const std::string bad = write_cfg("parallel.cfg", "a = [1, 1, 0, 2]\nb = [0, 1, 2, 3]\n");
  const Run e = run({"classify", "--config", bad});
  CHECK(e.code == kDomain);
  CHECK(e.err.find("adjacent sections parallel") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({"sweep", "--config", "/nonexistent/x.cfg"}).code == kConfig);
  CHECK(run({"--help"}).code == kOk);
  for (const char* sub : {"classify", "tree", "map", "modulus", "sweep", "verify"})
    CHECK(run({sub, "--help"}).code == kOk);
  CHECK(run({"frobnicate"}).code == kConfig);
  CHECK(run({}).code == kConfig);
  CHECK(run({"map", "--config", cfg("parallelogram.cfg"), "--z", "0.3-0.2i"}).code == kDomain);
  CHECK(run({"map", "--config", cfg("parallelogram.cfg"), "--z", "what"}).code == kConfig);
}

TEST_CASE("map") {
  const Run z0 = run({"map", "--config", cfg("parallelogram.cfg"), "--z", "0"});
  CHECK(z0.code == kOk);
  CHECK(z0.out.find("w[auto]: 0 + 0.10000000000000001i") != std::string::npos);
  const Run both = run({"map", "--config", cfg("parallelogram.cfg"), "--z", "0.3+0.2i", "--method", "both"});
  REQUIRE(both.code == kOk);
  const auto at = both.out.find("difference: ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(both.out.substr(at + 12)) < 1e-8);
  CHECK(both.out.find("w[integral]") != std::string::npos);
  CHECK(both.out.find("w[series]") != std::string::npos);
}

TEST_CASE("tree, modulus and verify") {
  const Run t = run({"tree", "--config", cfg("tree_b.cfg")});
  CHECK(t.code == kOk);
  CHECK(t.out.find("internal") != std::string::npos);
  const Run m = run({"modulus", "--config", cfg("parallelogram.cfg")});
  CHECK(m.code == kOk);
  CHECK(m.out.rfind("epsilon,z4,modulus,modulus_rotated,rengel_lo,rengel_hi\n", 0) == 0);
  const Run v = run({"verify", "--config", cfg("tree_c.cfg")});
  CHECK(v.code == kOk);
  CHECK(v.out.find("match") != std::string::npos);
}

TEST_CASE("sweep output is deterministic") {
  const fs::path dir = scratch();
  const std::string a = (dir / "run_a").string(), b = (dir / "run_b").string();
  REQUIRE(run({"sweep", "--config", cfg("tree_b.cfg"), "--out", a, "--svg"}).code == kOk);
  REQUIRE(run({"sweep", "--config", cfg("tree_b.cfg"), "--out", b}).code == kOk);
  const std::string ca = slurp(a + ".csv");
  CHECK(ca == slurp(b + ".csv"));
  CHECK(ca.rfind("epsilon,z4,modulus,l_estimate,sup_err_e1,sup_err_e2,sup_err_e3,sup_err_e4,sup_err_int,"
                 "sup_err_vertex\n",
                 0) == 0);
  CHECK(std::count(ca.begin(), ca.end(), '\n') == 10);
  // last row: l_estimate is the fourth column
  std::istringstream rows(ca);
  std::string line, last;
  while (std::getline(rows, line))
    if (!line.empty()) last = line;
  std::istringstream cols(last);
  std::string cell;
  for (int k = 0; k < 4; ++k) std::getline(cols, cell, ',');
  CHECK(std::abs(std::stod(cell) - 1) < 0.05);
  for (const char* fig : {"_quad.svg", "_z4.svg", "_logz4.svg"}) {
    const std::string s = slurp(a + fig);
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("version=\"1.1\"") != std::string::npos);
  }
  REQUIRE(run({"sweep", "--config", cfg("parallelogram.cfg"), "--out", a, "--format", "jsonl"}).code == kOk);
  const std::string j = slurp(a + ".jsonl");
  CHECK(j.rfind("{\"epsilon\":", 0) == 0);
  CHECK(std::count(j.begin(), j.end(), '\n') == 9);
}

TEST_CASE("standalone binary") {
  const std::string cmd = std::string(HOLOQUAD_CLI) + " classify --config " + cfg("tree_c.cfg") + " > " +
                          (scratch() / "bin.txt").string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(scratch() / "bin.txt").find("shape: (c)") != std::string::npos);
  const std::string missing = std::string(HOLOQUAD_CLI) + " classify --config /nonexistent.cfg 2> /dev/null";
  const int st = std::system(missing.c_str());
  CHECK(WEXITSTATUS(st) == kConfig);
}

} // TEST_SUITE
