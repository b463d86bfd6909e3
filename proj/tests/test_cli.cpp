// CLI contract checks: exit codes, offending-key naming, units conversion,
// worker-count independence of sweep output, SVG plotting. Spawns the real
// binary, so these run against the shared library exactly as users do.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <vector>
#include <sstream>
#include <string>

#ifndef HETCACHE_CLI_PATH
#define HETCACHE_CLI_PATH "hetcache"
#endif
#ifndef HETCACHE_PRESET_DIR
#define HETCACHE_PRESET_DIR "presets"
#endif

namespace {

int run(const std::string& args, const std::string& log = "cli_test.log") {
  const std::string cmd = std::string(HETCACHE_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

const std::string kScenario = std::string(HETCACHE_PRESET_DIR) + "/paper_defaults.scn";

}  // namespace

TEST_CASE("malformed scenario key exits 2 and names the key") {
  write_file("bad_key.scn", "lambda0 = 1e-6\nwobble = 3\n");
  CHECK(run("analyze --scenario bad_key.scn --scheme uc_in") == 2);
  CHECK(slurp("cli_test.log").find("wobble") != std::string::npos);
  std::remove("bad_key.scn");
}

TEST_CASE("invalid physical parameter exits 2 and names the invariant") {
  write_file("bad_alpha.scn", slurp(kScenario));
  // overwrite alpha1 with the boundary value
  std::string text = slurp("bad_alpha.scn");
  text.replace(text.find("alpha1 = 4"), 10, "alpha1 = 2");
  write_file("bad_alpha.scn", text);
  CHECK(run("analyze --scenario bad_alpha.scn --scheme uc_in") == 2);
  CHECK(slurp("cli_test.log").find("alpha1") != std::string::npos);
  std::remove("bad_alpha.scn");
}

TEST_CASE("missing scenario file exits 2") {
  CHECK(run("analyze --scenario does_not_exist.scn --scheme uc_in") == 2);
}

TEST_CASE("unknown scheme tag exits 2") {
  CHECK(run("analyze --scenario " + kScenario + " --scheme turbo_in") == 2);
}

TEST_CASE("bits output scales nats by 1/ln(2)") {
  REQUIRE(run("analyze --scenario " + kScenario + " --scheme uc_in --out cli_nats.txt") == 0);
  REQUIRE(run("analyze --scenario " + kScenario +
              " --scheme uc_in --units bits --out cli_bits.txt") == 0);
  auto first_value = [](const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("throughput = ", 0) == 0) {
        return std::stod(line.substr(13));
      }
    }
    return 0.0;
  };
  const double nats = first_value("cli_nats.txt");
  const double bits = first_value("cli_bits.txt");
  CHECK(nats > 0);
  CHECK(bits == doctest::Approx(nats / 0.6931471805599453).epsilon(1e-12));
  std::remove("cli_nats.txt");
  std::remove("cli_bits.txt");
}

TEST_CASE("sweep output is independent of the worker budget") {
  const std::string base = "sweep --scenario " + kScenario +
                           " --axis n1 --values 5,7 --schemes mpc_in,uc_in --seed 3 --out ";
  REQUIRE(run(base + "cli_w1.csv --workers 1") == 0);
  REQUIRE(run(base + "cli_w3.csv --workers 3") == 0);
  CHECK(slurp("cli_w1.csv") == slurp("cli_w3.csv"));
  CHECK(!slurp("cli_w1.csv").empty());
  std::remove("cli_w1.csv");
  std::remove("cli_w3.csv");
}

TEST_CASE("plot renders an SVG from sweep output") {
  const std::string base = "sweep --scenario " + kScenario +
                           " --axis c --values 10,20,40 --schemes mpc_in,uc_in --out cli_plot.csv";
  REQUIRE(run(base) == 0);
  REQUIRE(run("plot --in cli_plot.csv --out cli_plot.svg --title chart") == 0);
  const std::string svg = slurp("cli_plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("mpc_in") != std::string::npos);
  std::remove("cli_plot.csv");
  std::remove("cli_plot.svg");
}

TEST_CASE("per-file analyze table lists every file") {
  REQUIRE(run("analyze --scenario " + kScenario +
              " --scheme mpc_in --out cli_pf.txt") == 0);
  const std::string text = slurp("cli_pf.txt");
  CHECK(text.find("file,t_n,ps,pm,r0,r1,fm,fs") != std::string::npos);
  CHECK(text.find("\n100,") != std::string::npos);
  std::remove("cli_pf.txt");
}

TEST_CASE("file diversity gain widens with the antenna count") {
  const std::string cmd = "sweep --scenario " + kScenario +
                          " --axis n1 --values 2,7,12 --schemes rc_in,mpc_in --out cli_fdg.csv";
  REQUIRE(run(cmd) == 0);
  std::ifstream in("cli_fdg.csv");
  std::string line;
  std::getline(in, line);  // header
  std::map<double, std::map<std::string, double>> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    rows[std::stod(f[1])][f[2]] = std::stod(f[5]);
  }
  const double gap2 = rows[2]["rc_in"] - rows[2]["mpc_in"];
  const double gap7 = rows[7]["rc_in"] - rows[7]["mpc_in"];
  const double gap12 = rows[12]["rc_in"] - rows[12]["mpc_in"];
  CHECK(gap7 > gap2);
  CHECK(gap12 > gap7);
  std::remove("cli_fdg.csv");
}

TEST_CASE("single-point surface degenerates to the matching sweep value") {
  REQUIRE(run("surface --scenario " + kScenario +
              " --rc-values 90 --gamma-values 0.5 --out cli_surf1.csv") == 0);
  REQUIRE(run("sweep --scenario " + kScenario +
              " --axis rc --values 90 --schemes rc_in --out cli_sweep1.csv") == 0);
  auto field = [](const std::string& path, const char* kind) -> std::string {
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    while (std::getline(in, line)) {
      if (line.rfind(kind, 0) == 0) {
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        return f[6];  // throughput column
      }
    }
    return "";
  };
  const std::string surf = field("cli_surf1.csv", "grid");
  std::ifstream sw("cli_sweep1.csv");
  std::string header, line;
  std::getline(sw, header);
  std::getline(sw, line);
  std::stringstream ss(line);
  std::vector<std::string> f;
  std::string tok;
  while (std::getline(ss, tok, ',')) f.push_back(tok);
  CHECK(surf == f[5]);  // identical text, hence identical bits
  CHECK(!surf.empty());
  std::remove("cli_surf1.csv");
  std::remove("cli_sweep1.csv");
}

TEST_CASE("sweep continues past per-point failures and exits 4") {
  // c = 150 exceeds the catalog size at one sweep point
  const std::string base = "sweep --scenario " + kScenario +
                           " --axis c --values 20,150 --schemes uc_in --out cli_fail.csv";
  CHECK(run(base) == 4);
  const std::string csv = slurp("cli_fail.csv");
  CHECK(csv.find("error") != std::string::npos);
  CHECK(csv.find("ok") != std::string::npos);  // the valid point still produced a row
  std::remove("cli_fail.csv");
}
