// Acceptance suite: one binary, nine numbered criteria, one pass/fail line
// each. `acceptance` runs everything; `acceptance --criterion N` runs one
// criterion (that is how ctest parallelizes them). Exit code is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hetcache/analytic.hpp"
#include "hetcache/optimize.hpp"
#include "hetcache/simulate.hpp"
#include "hetcache/special.hpp"
#include "test_support.hpp"

#ifndef HETCACHE_CLI_PATH
#define HETCACHE_CLI_PATH "hetcache"
#endif
#ifndef HETCACHE_PRESET_DIR
#define HETCACHE_PRESET_DIR "presets"
#endif

using namespace hetcache;

namespace {

struct Check {
  std::string label;
  bool ok;
  std::string detail;
};

std::vector<Check> g_checks;

void expect(bool ok, const std::string& label, const std::string& detail = "") {
  g_checks.push_back({label, ok, detail});
}

void expect_close(double got, double want, double rel_tol, const std::string& label) {
  const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
  std::ostringstream os;
  os << "got " << got << ", want " << want << ", rel " << rel << ", tol " << rel_tol;
  expect(rel <= rel_tol, label, os.str());
}

int run_cli(const std::string& args, const std::string& log_path) {
  const std::string cmd = std::string(HETCACHE_CLI_PATH) + " " + args + " >" + log_path + " 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::runtime_error("missing CSV column " + name);
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (first) {
      t.columns = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

Scenario defaults_with_near_opt(Beamforming mode) {
  Scenario s = paper_default_scenario();
  opt::OptimizerSpec spec;
  const auto res = opt::solve_p1_near_opt(s, spec, mode, QuadratureSpec{});
  return s.with_cache(res.cache);
}

// ------------------------------------------------------------ criterion 1 --
// Analytic vs Monte-Carlo agreement at the default operating point with the
// near-optimal cache: full fidelity within 5%, matched fidelity within 2%.
void criterion1() {
  const Scenario s = defaults_with_near_opt(Beamforming::IN);
  const auto ana = analytic::throughput(s, Beamforming::IN, QuadratureSpec{});

  sim::SimulationSpec spec;
  spec.realizations = 10000;
  spec.seed = 20240801;
  spec.workers = 0;

  spec.fidelity = sim::Fidelity::Full;
  const auto full = sim::estimate_throughput(s, spec, Beamforming::IN);
  const double rel_full = std::abs(ana.throughput - full.throughput) / full.throughput;
  expect(rel_full <= 0.05, "analytic vs full-fidelity simulation within 5%",
         "rel err " + std::to_string(rel_full) + " (analytic " + std::to_string(ana.throughput) +
             ", sim " + std::to_string(full.throughput) + " +- " +
             std::to_string(full.std_error) + ")");

  spec.fidelity = sim::Fidelity::Matched;
  const auto matched = sim::estimate_throughput(s, spec, Beamforming::IN);
  const double rel_matched = std::abs(ana.throughput - matched.throughput) / matched.throughput;
  expect(rel_matched <= 0.02, "analytic vs matched-fidelity simulation within 2%",
         "rel err " + std::to_string(rel_matched));
}

// ------------------------------------------------------------ criterion 2 --
// Residual-ratio series: exact at n1 = 1, 1e-9 against an extended-precision
// oracle at (7, 4), monotone non-increasing in n1.
void criterion2() {
  bool exact_one = true;
  for (double kbar : {0.0, 0.5, 2.0, 4.0, 16.0}) {
    exact_one = exact_one && analytic::residual_ratio(1, kbar) == 1.0;
  }
  expect(exact_one, "epsilon(n1=1, any kbar) equals one exactly");

  long double eps = 0.0L, p = std::exp(-4.0L), tail = 1.0L;
  for (int k = 0;; ++k) {
    if (k >= 6) eps += (static_cast<long double>(k + 1) - 6) / (k + 1) * p;
    tail -= p;
    if (k >= 6 && tail < 1e-30L) break;
    p *= 4.0L / (k + 1);
  }
  const double got = analytic::residual_ratio(7, 4.0);
  expect(std::abs(got - static_cast<double>(eps)) <= 1e-9,
         "epsilon(7, 4) matches the extended-precision series oracle to 1e-9",
         "got " + std::to_string(got) + ", oracle " + std::to_string(static_cast<double>(eps)));

  bool monotone = true;
  double prev = 2.0;
  for (int n1 = 1; n1 <= 16; ++n1) {
    const double e = analytic::residual_ratio(n1, 4.0);
    monotone = monotone && e <= prev + 1e-15;
    prev = e;
  }
  expect(monotone, "epsilon non-increasing over n1 in 1..16");
}

// ------------------------------------------------------------ criterion 3 --
// Closed-form spot checks.
void criterion3() {
  const Scenario s = paper_default_scenario();
  const double ps = analytic::hit_probability(1.0, s.config.lambda1, s.config.rc_m);
  expect(std::abs(ps - (-std::expm1(-4.0))) <= 1e-12,
         "hit_probability(1) equals 1 - e^-4 at default geometry to 1e-12",
         "got " + std::to_string(ps));

  const double beta = special::incomplete_beta(0.5, 0.5, 1.0);
  expect(std::abs(beta - kPi) <= 1e-8, "incomplete_beta(1/2,1/2,1) equals pi to 1e-8",
         "got " + std::to_string(beta));

  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-12;
  const double hamdi = analytic::mean_log1p_from_laplace(
      [](double t) { return t / (1.0 + t); }, [](double t) { return std::exp(-t); }, spec);
  expect(std::abs(hamdi - 0.596347362323194) <= 1e-3,
         "scalar E[ln(1+S)] identity e*Gamma(0,1) to 1e-3", "got " + std::to_string(hamdi));
}

// ------------------------------------------------------------ criterion 4 --
// Analytic fs derivative against central finite differences.
void criterion4() {
  const Scenario s = paper_default_scenario();
  const auto prof = analytic::make_in_profile(s.config);
  QuadratureSpec quad;
  const double h = 1e-5;
  for (double tn : {0.1, 0.5, 0.9}) {
    const double fd = (analytic::fs_term(tn + h, s.config, prof, quad) -
                       analytic::fs_term(tn - h, s.config, prof, quad)) /
                      (2.0 * h);
    const double an = analytic::fs_derivative(tn, s.config, prof, quad);
    const double rel = std::abs(an - fd) / std::max(std::abs(fd), 1e-300);
    expect(rel <= 1e-4,
           "fs_derivative matches finite differences at t_n = " + std::to_string(tn),
           "rel err " + std::to_string(rel));
  }
}

// ------------------------------------------------------------ criterion 5 --
// Near-opt structure: budget, ordering, and the objective gap to gradient
// projection inside the concave regime (rc = 70 m).
void criterion5() {
  Scenario s = paper_default_scenario();
  opt::OptimizerSpec near_spec;
  const auto near_default = opt::solve_p1_near_opt(s, near_spec, Beamforming::IN, QuadratureSpec{});
  const double budget = static_cast<double>(s.cache_capacity);
  double sum = 0;
  for (double t : near_default.cache.t) sum += t;
  expect(std::abs(sum - budget) <= 1e-9 * budget, "near-opt budget |sum(T*) - C| <= 1e-9 C",
         "residual " + std::to_string(sum - budget));
  bool monotone = true;
  for (std::size_t n = 1; n < near_default.cache.t.size(); ++n) {
    monotone = monotone && near_default.cache.t[n] <= near_default.cache.t[n - 1] + 1e-12;
  }
  expect(monotone, "near-opt output ordered t1 >= t2 >= ... >= tF");

  Scenario inside = paper_default_scenario();
  inside.config.rc_m = 70.0;
  const auto near70 = opt::solve_p1_near_opt(inside, near_spec, Beamforming::IN, QuadratureSpec{});
  opt::OptimizerSpec p0_spec;
  p0_spec.method = opt::Method::GradientProjection;
  const auto local70 = opt::solve_p0(inside, p0_spec, Beamforming::IN, QuadratureSpec{});
  const double gap = std::abs(near70.objective - local70.objective) / local70.objective;
  expect(gap <= 0.01, "near-opt vs gradient-projection objective gap <= 1% at rc = 70 m",
         "gap " + std::to_string(gap) + " (near " + std::to_string(near70.objective) +
             ", local " + std::to_string(local70.objective) + ")");
}

// ------------------------------------------------------------ criterion 6 --
// Scheme ordering at the default operating point, with simulation margins
// exceeding the combined standard errors.
void criterion6() {
  QuadratureSpec quad;
  const Scenario rc_in = defaults_with_near_opt(Beamforming::IN);
  const Scenario rc_mrt = defaults_with_near_opt(Beamforming::MRT);
  Scenario base = paper_default_scenario();
  const Scenario mpc = base.with_cache(baseline_cache(CacheFamily::MPC, base.catalog, 20));

  const double a_rc_in = analytic::throughput(rc_in, Beamforming::IN, quad).throughput;
  const double a_mpc_in = analytic::throughput(mpc, Beamforming::IN, quad).throughput;
  const double a_mpc_mrt = analytic::throughput(mpc, Beamforming::MRT, quad).throughput;
  const double a_rc_mrt = analytic::throughput(rc_mrt, Beamforming::MRT, quad).throughput;
  expect(a_rc_in >= a_mpc_in && a_mpc_in >= a_mpc_mrt && a_rc_in >= a_rc_mrt,
         "analytic ordering R(RC&IN) >= R(MPC&IN) >= R(MPC&MRT), R(RC&IN) >= R(RC&MRT)",
         "rc_in " + std::to_string(a_rc_in) + ", mpc_in " + std::to_string(a_mpc_in) +
             ", mpc_mrt " + std::to_string(a_mpc_mrt) + ", rc_mrt " + std::to_string(a_rc_mrt));

  sim::SimulationSpec spec;
  spec.realizations = 10000;
  spec.seed = 777;
  spec.fidelity = sim::Fidelity::Full;
  const auto s_rc_in = sim::estimate_throughput(rc_in, spec, Beamforming::IN);
  const auto s_mpc_in = sim::estimate_throughput(mpc, spec, Beamforming::IN);
  const auto s_mpc_mrt = sim::estimate_throughput(mpc, spec, Beamforming::MRT);
  const auto s_rc_mrt = sim::estimate_throughput(rc_mrt, spec, Beamforming::MRT);

  auto margin_ok = [](const analytic::ThroughputReport& hi, const analytic::ThroughputReport& lo) {
    return hi.throughput - lo.throughput > hi.std_error + lo.std_error;
  };
  expect(margin_ok(s_rc_in, s_mpc_in), "simulated R(RC&IN) > R(MPC&IN) beyond standard error",
         std::to_string(s_rc_in.throughput) + " vs " + std::to_string(s_mpc_in.throughput));
  expect(margin_ok(s_mpc_in, s_mpc_mrt), "simulated R(MPC&IN) > R(MPC&MRT) beyond standard error",
         std::to_string(s_mpc_in.throughput) + " vs " + std::to_string(s_mpc_mrt.throughput));
  expect(margin_ok(s_rc_in, s_rc_mrt), "simulated R(RC&IN) > R(RC&MRT) beyond standard error",
         std::to_string(s_rc_in.throughput) + " vs " + std::to_string(s_rc_mrt.throughput));
}

// ------------------------------------------------------------ criterion 7 --
// Shape claims over the preset grids, through the CLI and its CSV output.
void criterion7() {
  const std::string preset = HETCACHE_PRESET_DIR;

  // (a) rc sweep of RC&IN unimodal, argmax within one grid step of 70.7 m
  {
    const int rc = run_cli("sweep --plan " + preset + "/fig2.plan --out c7_fig2.csv --workers 2",
                           "c7_fig2.log");
    expect(rc == 0, "fig2 preset sweep runs clean", "exit " + std::to_string(rc));
    const auto csv = read_csv("c7_fig2.csv");
    std::vector<std::pair<double, double>> curve;
    for (const auto& row : csv.rows) {
      if (row[csv.col("scheme")] == "rc_in" && row[csv.col("status")] == "ok") {
        curve.emplace_back(std::stod(row[csv.col("axis_value")]),
                           std::stod(row[csv.col("throughput")]));
      }
    }
    std::sort(curve.begin(), curve.end());
    std::size_t arg = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].second > curve[arg].second) arg = i;
    }
    bool unimodal = true;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (i <= arg) {
        unimodal = unimodal && curve[i].second >= curve[i - 1].second - 1e-12;
      } else {
        unimodal = unimodal && curve[i].second <= curve[i - 1].second + 1e-12;
      }
    }
    expect(unimodal && !curve.empty(), "rc sweep of RC&IN is unimodal on the preset grid");
    const double best_rc = curve.empty() ? 0 : curve[arg].first;
    const double step = arg + 1 < curve.size()
                            ? curve[arg + 1].first - curve[arg].first
                            : curve[arg].first - curve[arg - 1].first;
    expect(std::abs(best_rc - 70.7) <= step + 1e-9,
           "argmax rc within one grid step of sqrt(2/(pi lambda1)) = 70.7 m",
           "argmax " + std::to_string(best_rc));
  }

  // (b) throughput non-decreasing in C for every scheme
  {
    const int rc = run_cli("sweep --plan " + preset + "/fig3.plan --out c7_fig3.csv --workers 2",
                           "c7_fig3.log");
    expect(rc == 0, "fig3 preset sweep runs clean", "exit " + std::to_string(rc));
    const auto csv = read_csv("c7_fig3.csv");
    std::map<std::string, std::vector<std::pair<double, double>>> by_scheme;
    for (const auto& row : csv.rows) {
      if (row[csv.col("status")] == "ok") {
        by_scheme[row[csv.col("scheme")]].emplace_back(std::stod(row[csv.col("axis_value")]),
                                                       std::stod(row[csv.col("throughput")]));
      }
    }
    bool all_monotone = !by_scheme.empty();
    std::string offender;
    for (auto& [scheme, pts] : by_scheme) {
      std::sort(pts.begin(), pts.end());
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].second < pts[i - 1].second - 1e-9 * std::abs(pts[i - 1].second)) {
          all_monotone = false;
          offender = scheme + " at C = " + std::to_string(pts[i].first);
        }
      }
    }
    expect(all_monotone, "throughput non-decreasing in cache size for every scheme", offender);
  }

  // (c) L1 distance of the near-opt cache to MPC non-increasing in gamma
  {
    std::vector<double> l1;
    for (double gamma : {0.2, 0.5, 1.0, 1.5, 2.0}) {
      Scenario s = paper_default_scenario();
      s.catalog = make_zipf_catalog(100, gamma);
      const auto res = opt::solve_p1_near_opt(s, opt::OptimizerSpec{}, Beamforming::IN,
                                              QuadratureSpec{});
      const auto mpc = baseline_cache(CacheFamily::MPC, s.catalog, s.cache_capacity);
      double d = 0;
      for (int n = 0; n < 100; ++n) d += std::abs(res.cache.t[n] - mpc.t[n]);
      l1.push_back(d);
    }
    bool non_increasing = true;
    for (std::size_t i = 1; i < l1.size(); ++i) {
      non_increasing = non_increasing && l1[i] <= l1[i - 1] + 1e-9;
    }
    std::ostringstream os;
    for (double d : l1) os << d << " ";
    expect(non_increasing, "L1 distance of the optimal cache to MPC non-increasing in gamma",
           os.str());
  }

  // (d) surface ridge of best rc non-increasing in gamma; the gamma = 0.5 row
  // reproduces the fig2 sweep bit-exactly
  {
    const int rc = run_cli("surface --plan " + preset + "/fig5.plan --out c7_fig5.csv --workers 2",
                           "c7_fig5.log");
    expect(rc == 0, "fig5 preset surface runs clean", "exit " + std::to_string(rc));
    const auto csv = read_csv("c7_fig5.csv");
    std::vector<std::pair<double, double>> ridge;
    std::map<std::string, std::string> slice;  // rc -> throughput text at gamma = 0.5
    for (const auto& row : csv.rows) {
      if (row[csv.col("kind")] == "ridge") {
        ridge.emplace_back(std::stod(row[csv.col("gamma")]), std::stod(row[csv.col("rc_m")]));
      } else if (row[csv.col("gamma")] == "0.5" && row[csv.col("status")] == "ok") {
        slice[row[csv.col("rc_m")]] = row[csv.col("throughput")];
      }
    }
    std::sort(ridge.begin(), ridge.end());
    bool non_increasing = !ridge.empty();
    for (std::size_t i = 1; i < ridge.size(); ++i) {
      non_increasing = non_increasing && ridge[i].second <= ridge[i - 1].second + 1e-9;
    }
    std::ostringstream os;
    for (const auto& [gam, r] : ridge) os << "(" << gam << ", " << r << ") ";
    expect(non_increasing, "fig5 ridge of optimal rc non-increasing in gamma", os.str());

    const auto fig2 = read_csv("c7_fig2.csv");
    bool bitexact = !slice.empty();
    std::string mismatch;
    for (const auto& row : fig2.rows) {
      if (row[fig2.col("scheme")] != "rc_in") continue;
      const auto it = slice.find(row[fig2.col("axis_value")]);
      if (it == slice.end()) continue;
      if (it->second != row[fig2.col("throughput")]) {
        bitexact = false;
        mismatch = "rc = " + it->first + ": " + it->second + " vs " +
                   row[fig2.col("throughput")];
      }
    }
    expect(bitexact, "fig5 gamma = 0.5 row matches the fig2 sweep bit-exactly", mismatch);
  }
}

// ------------------------------------------------------------ criterion 8 --
// Simulator statistical sanity.
void criterion8() {
  {
    const double radius = 100.0;
    const double density = 100.0 / (kPi * radius * radius);
    double sum = 0, sum_sq = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      sim::Stream rng(4242, static_cast<std::uint64_t>(i), 7);
      const double n = static_cast<double>(sim::sample_ppp(density, radius, rng).size());
      sum += n;
      sum_sq += n * n;
    }
    const double mean = sum / draws;
    const double var = (sum_sq - draws * mean * mean) / (draws - 1);
    expect(std::abs(mean - 100.0) / 100.0 <= 0.02 && std::abs(var / mean - 1.0) <= 0.05,
           "PPP counts Poisson-dispersed (mean within 2%, var/mean within 5%)",
           "mean " + std::to_string(mean) + ", var/mean " + std::to_string(var / mean));
  }

  {
    Scenario s = paper_default_scenario();
    s = s.with_cache(baseline_cache(CacheFamily::UC, s.catalog, s.cache_capacity));
    sim::SimulationSpec spec;
    spec.fidelity = sim::Fidelity::Matched;
    spec.seed = 515;
    const double tn = 0.2;
    const double a = kPi * tn * s.config.lambda1;
    const double rc = s.config.rc_m;
    const double denom = -std::expm1(-a * rc * rc);
    std::vector<double> dist;
    dist.reserve(100000);
    for (std::uint32_t i = 0; dist.size() < 100000; ++i) {
      sim::NetworkRealization world(s, spec, Beamforming::IN, i);
      const auto serving = world.associate(0);
      if (serving.tier == analytic::Tier::SBS) dist.push_back(serving.distance);
    }
    std::sort(dist.begin(), dist.end());
    double d = 0;
    const double n = static_cast<double>(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double f = -std::expm1(-a * dist[i] * dist[i]) / denom;
      d = std::max(d, std::max(std::abs((i + 1) / n - f), std::abs(f - i / n)));
    }
    expect(d < 0.01, "serving-distance KS distance against the closed form < 0.01 at 1e5 samples",
           "KS " + std::to_string(d));
  }

  {
    // The analysis models the scheduled-user field as a PPP of the SBS
    // density; the request count it sends through a disc of radius rc around
    // a typical location is then Poisson(4).
    Scenario s = paper_default_scenario();
    s = s.with_cache(baseline_cache(CacheFamily::UC, s.catalog, s.cache_capacity));
    sim::SimulationSpec spec;
    spec.fidelity = sim::Fidelity::Full;
    spec.seed = 909;
    std::vector<int> ks;
    for (std::uint32_t i = 0; i < 10000; ++i) {
      sim::NetworkRealization world(s, spec, Beamforming::IN, i);
      if (auto k = world.scheduled_field_count(s.config.rc_m)) ks.push_back(*k);
    }
    const int kmax = *std::max_element(ks.begin(), ks.end());
    double d = 0, cdf = 0;
    for (int k = 0; k <= kmax; ++k) {
      cdf += special::poisson_pmf(4.0, k);
      const double emp = static_cast<double>(std::count_if(ks.begin(), ks.end(),
                                                           [&](int v) { return v <= k; })) /
                         static_cast<double>(ks.size());
      d = std::max(d, std::abs(emp - cdf));
    }
    expect(d < 0.03, "full-fidelity nulling-request field within KS 0.03 of Poisson(4)",
           "KS " + std::to_string(d) + " over " + std::to_string(ks.size()) + " fields");
  }
}

// ------------------------------------------------------------ criterion 9 --
// CLI determinism: identical seeds give byte-identical output files.
void criterion9() {
  const std::string preset = HETCACHE_PRESET_DIR;
  const std::string scn = preset + "/paper_defaults.scn";

  const std::string sweep_args =
      "sweep --scenario " + scn +
      " --axis n1 --values 6,7 --schemes mpc_in,uc_mrt --engine simulate --fidelity matched"
      " --realizations 300 --seed 97 --workers 2 --out ";
  int rc1 = run_cli(sweep_args + "c9_a.csv", "c9_a.log");
  int rc2 = run_cli(sweep_args + "c9_b.csv", "c9_b.log");
  expect(rc1 == 0 && rc2 == 0, "determinism sweep runs clean",
         "exits " + std::to_string(rc1) + ", " + std::to_string(rc2));
  expect(slurp("c9_a.csv") == slurp("c9_b.csv") && !slurp("c9_a.csv").empty(),
         "repeated seeded sweep produces byte-identical CSV");

  const std::string opt_args = "optimize --scenario " + scn + " --optimizer near --out ";
  rc1 = run_cli(opt_args + "c9_opt_a.json", "c9_opt_a.log");
  rc2 = run_cli(opt_args + "c9_opt_b.json", "c9_opt_b.log");
  expect(rc1 == 0 && rc2 == 0, "determinism optimize runs clean");
  expect(slurp("c9_opt_a.json") == slurp("c9_opt_b.json") && !slurp("c9_opt_a.json").empty(),
         "repeated optimize produces byte-identical JSON");

  const std::string verify_args = "verify --scenario " + scn +
                                  " --scheme uc_in --realizations 200 --seed 7 --workers 2 --out ";
  rc1 = run_cli(verify_args + "c9_v_a.csv", "c9_v_a.log");
  rc2 = run_cli(verify_args + "c9_v_b.csv", "c9_v_b.log");
  expect(rc1 == 0 && rc2 == 0, "determinism verify runs clean");
  expect(slurp("c9_v_a.csv") == slurp("c9_v_b.csv") && !slurp("c9_v_a.csv").empty(),
         "repeated seeded verify produces byte-identical CSV");
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::map<int, std::function<void()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};

  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (only != 0 && id != only) continue;
    g_checks.clear();
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      fn();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration_cast<std::chrono::duration<double>>(
            std::chrono::steady_clock::now() - start)
            .count();
    bool ok = error.empty();
    for (const auto& c : g_checks) ok = ok && c.ok;
    std::printf("[%s] criterion %d (%.1fs)\n", ok ? "PASS" : "FAIL", id, secs);
    for (const auto& c : g_checks) {
      if (!c.ok || only != 0) {
        std::printf("    %s %s%s%s\n", c.ok ? "ok  " : "FAIL", c.label.c_str(),
                    c.detail.empty() ? "" : " -- ", c.detail.c_str());
      }
    }
    if (!error.empty()) std::printf("    FAIL uncaught error: %s\n", error.c_str());
    failed += ok ? 0 : 1;
  }
  return failed;
}
