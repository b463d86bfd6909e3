// Command-line front end for the hetcache shared library: scenario analysis,
// figure sweeps, analytic-vs-simulation verification, cache optimization and
// SVG plotting of the emitted CSV. Everything below talks to the core through
// the C API in hetcache.h.

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "svg_chart.hpp"

namespace hcli {
namespace {

constexpr double kLn2 = 0.6931471805599453;

struct GlobalOpts {
  std::string scenario_path;
  std::string out_path;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string engine = "analytic";  // analytic | simulate | both
  std::string mode = "in";          // in | mrt
  std::string units = "nats";      // nats | bits
  bool timings = false;             // off by default: output files stay byte-stable
};

double unit_scale(const GlobalOpts& g) { return g.units == "bits" ? 1.0 / kLn2 : 1.0; }

hc_mode mode_of(const std::string& mode) {
  if (mode == "in") return HC_MODE_IN;
  if (mode == "mrt") return HC_MODE_MRT;
  throw CliError(2, "unknown mode '" + mode + "' (want in or mrt)");
}

struct SchemeParts {
  std::string family;  // rc | mpc | uc | iidc
  hc_mode mode = HC_MODE_IN;
};

SchemeParts parse_scheme_tag(const std::string& tag) {
  const auto us = tag.rfind('_');
  if (us == std::string::npos) throw CliError(2, "bad scheme tag '" + tag + "'");
  SchemeParts p;
  p.family = tag.substr(0, us);
  const std::string mode = tag.substr(us + 1);
  if (p.family != "rc" && p.family != "mpc" && p.family != "uc" && p.family != "iidc") {
    throw CliError(2, "unknown cache family in scheme tag '" + tag + "'");
  }
  if (mode == "in") {
    p.mode = HC_MODE_IN;
  } else if (mode == "mrt") {
    p.mode = HC_MODE_MRT;
  } else {
    throw CliError(2, "unknown beamforming mode in scheme tag '" + tag + "'");
  }
  return p;
}

hc_opt_method method_of(const std::string& optimizer) {
  if (optimizer == "near") return HC_OPT_KKT_NEAR_OPT;
  if (optimizer == "local") return HC_OPT_GRADIENT_PROJECTION;
  throw CliError(2, "unknown optimizer '" + optimizer + "' (want near or local)");
}

// Installs the scheme's cache on a scenario clone; RC runs the optimizer.
void install_cache(ScenarioHandle& scn, const SchemeParts& scheme, hc_opt_method method) {
  if (scheme.family == "rc") {
    hc_opt_result* res = nullptr;
    check(hc_optimize(scn.ptr, method, scheme.mode, &res), "optimizing cache placement");
    OptHandle guard(res);
    std::vector<double> t(hc_opt_cache(res, nullptr, 0));
    hc_opt_cache(res, t.data(), t.size());
    check(hc_scenario_set_cache(scn.ptr, t.data(), t.size()), "installing optimized cache");
  } else {
    check(hc_scenario_set_scheme(scn.ptr, scheme.family.c_str()), "installing baseline cache");
  }
}

struct EngineResult {
  double throughput = 0;
  double std_error = 0;
  double epsilon = 0;
  int support = 0;
};

EngineResult run_engine(const ScenarioHandle& scn, hc_mode mode, const std::string& engine,
                        hc_fidelity fidelity, std::uint32_t realizations, std::uint64_t seed,
                        int workers) {
  hc_report* rep = nullptr;
  if (engine == "analytic") {
    check(hc_analyze(scn.ptr, mode, &rep), "analytic evaluation");
  } else {
    check(hc_simulate(scn.ptr, mode, fidelity, realizations, seed, workers, nullptr, &rep),
          "simulation");
  }
  ReportHandle guard(rep);
  EngineResult out;
  out.throughput = hc_report_throughput(rep);
  out.std_error = hc_report_std_error(rep);
  out.epsilon = hc_report_epsilon(rep);
  out.support = hc_report_support_size(rep);
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(2, "cannot open output file: " + path);
  out << body;
}

// ----------------------------------------------------------------- analyze --

int cmd_analyze(const GlobalOpts& g, const std::string& scheme_tag, const std::string& optimizer,
                bool summary_only) {
  ScenarioHandle scn = ScenarioHandle::load(g.scenario_path);
  hc_mode mode = mode_of(g.mode);

  std::string family = "file";
  if (!scheme_tag.empty()) {
    SchemeParts parts = parse_scheme_tag(scheme_tag);
    mode = parts.mode;
    family = parts.family;
    install_cache(scn, parts, method_of(optimizer));
  }
  if (hc_scenario_validate(scn.ptr) != HC_OK) {
    throw CliError(2, std::string("scenario invalid: ") + hc_last_error());
  }

  hc_report* rep = nullptr;
  check(hc_analyze(scn.ptr, mode, &rep), "analytic evaluation");
  ReportHandle guard(rep);

  const double scale = unit_scale(g);
  double kbar = 0, rstar = 0;
  check(hc_kbar(scn.ptr, &kbar), "kbar");
  check(hc_convex_regime_radius(scn.ptr, &rstar), "convex regime radius");
  const double rc = scn.get("rc_m");

  std::ostringstream out;
  out << "scenario " << scn.hash() << " (" << family << ", "
      << (mode == HC_MODE_IN ? "in" : "mrt") << ")\n";
  out << "throughput = " << format_double(hc_report_throughput(rep) * scale) << " " << g.units
      << "/s\n";
  out << "epsilon = " << format_double(hc_report_epsilon(rep)) << "\n";
  out << "kbar = " << format_double(kbar) << "\n";
  out << "support |F+| = " << hc_report_support_size(rep) << "\n";
  out << "convex regime: rc = " << format_double(rc) << " m, bound sqrt(2/(pi lambda1)) = "
      << format_double(rstar) << " m -> " << (rc <= rstar ? "inside" : "outside") << "\n";
  for (std::size_t w = 0; w < hc_report_warnings(rep); ++w) {
    out << "warning: " << hc_report_warning(rep, w) << "\n";
  }
  if (!summary_only) {
    out << "file,t_n,ps,pm,r0,r1,fm,fs\n";
    const std::vector<double> t = scn.cache();
    for (std::size_t i = 0; i < hc_report_files(rep); ++i) {
      hc_file_rates row;
      check(hc_report_file(rep, i, &row), "per-file rates");
      out << (i + 1) << ',' << format_double(t[i]) << ',' << format_double(row.ps) << ','
          << format_double(row.pm) << ',' << format_double(row.r0) << ','
          << format_double(row.r1) << ',' << format_double(row.fm * scale) << ','
          << format_double(row.fs * scale) << "\n";
    }
  }

  std::cout << out.str();
  if (!g.out_path.empty()) write_text_file(g.out_path, out.str());
  return 0;
}

// ---------------------------------------------------------------- optimize --

int cmd_optimize(const GlobalOpts& g, const std::string& optimizer, int probe_points) {
  ScenarioHandle scn = ScenarioHandle::load(g.scenario_path);
  const hc_mode mode = mode_of(g.mode);
  const hc_opt_method method = method_of(optimizer);

  const auto start = std::chrono::steady_clock::now();
  hc_opt_result* res = nullptr;
  check(hc_optimize(scn.ptr, method, mode, &res), "optimizing cache placement");
  OptHandle guard(res);
  const auto stop = std::chrono::steady_clock::now();
  const double wall_ms =
      g.timings
          ? std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
                .count()
          : 0.0;

  std::vector<double> t(hc_opt_cache(res, nullptr, 0));
  hc_opt_cache(res, t.data(), t.size());
  std::vector<double> trace(hc_opt_trace(res, nullptr, 0));
  hc_opt_trace(res, trace.data(), trace.size());

  hc_convexity probe{};
  std::vector<double> grid;
  for (int i = 0; i < probe_points; ++i) {
    grid.push_back(probe_points == 1 ? 0.5 : static_cast<double>(i) / (probe_points - 1));
  }
  check(hc_convexity_probe(scn.ptr, grid.data(), grid.size(), &probe), "convexity probe");

  const double scale = unit_scale(g);
  std::ostringstream out;
  out << "{\n";
  out << "  \"scheme\": \"rc_" << (mode == HC_MODE_IN ? "in" : "mrt") << "\",\n";
  out << "  \"method\": \"" << (method == HC_OPT_KKT_NEAR_OPT ? "kkt_near_opt"
                                                              : "gradient_projection")
      << "\",\n";
  out << "  \"scenario_hash\": \"" << scn.hash() << "\",\n";
  out << "  \"objective\": " << format_double(hc_opt_objective(res) * scale) << ",\n";
  out << "  \"units\": \"" << g.units << "/s\",\n";
  if (std::isfinite(hc_opt_nu_star(res))) {
    out << "  \"nu_star\": " << format_double(hc_opt_nu_star(res)) << ",\n";
  } else {
    out << "  \"nu_star\": null,\n";
  }
  out << "  \"iterations\": " << hc_opt_iterations(res) << ",\n";
  out << "  \"converged\": " << (hc_opt_converged(res) ? "true" : "false") << ",\n";
  out << "  \"heuristic\": " << (hc_opt_heuristic(res) ? "true" : "false") << ",\n";
  out << "  \"convexity\": {\"inside_regime\": " << (probe.inside_convex_regime ? "true" : "false")
      << ", \"fs_second_all_nonpositive\": " << (probe.all_nonpositive ? "true" : "false")
      << ", \"fs_second_min\": " << format_double(probe.min_fs_second)
      << ", \"fs_second_max\": " << format_double(probe.max_fs_second)
      << ", \"fm_second_at_zero\": " << format_double(probe.fm_second_at_zero) << "},\n";
  out << "  \"wall_ms\": " << format_double(wall_ms) << ",\n";
  std::size_t warn_count = hc_opt_warnings(res);
  out << "  \"warnings\": [";
  for (std::size_t w = 0; w < warn_count; ++w) {
    out << (w ? ", " : "") << "\"" << hc_opt_warning(res, w) << "\"";
  }
  out << "],\n";
  out << "  \"trace_len\": " << trace.size() << ",\n";
  out << "  \"t\": [";
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << format_double(t[i]);
  out << "]\n}\n";

  std::cout << out.str();
  if (!g.out_path.empty()) write_text_file(g.out_path, out.str());
  return 0;
}

// ------------------------------------------------------------------- sweep --

struct SweepPlan {
  std::string scenario_path;
  std::string axis;  // n1 | rc | c | gamma | rc_gamma_grid
  std::vector<double> values;
  std::vector<double> gamma_values;  // rc_gamma_grid only
  std::vector<std::string> schemes;
  std::string engine = "analytic";
  std::string optimizer = "near";
  std::string fidelity = "full";
  std::uint32_t realizations = 10000;
  std::uint64_t seed = 1;
  std::string output;
};

std::string axis_key(const std::string& axis) {
  if (axis == "n1") return "n1";
  if (axis == "rc") return "rc_m";
  if (axis == "c") return "c";
  if (axis == "gamma") return "gamma";
  throw CliError(2, "unknown sweep axis '" + axis + "'");
}

SweepPlan load_plan(const std::string& path) {
  const auto kv = parse_kv_file(path);
  SweepPlan plan;
  auto want = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw CliError(2, std::string("plan misses key '") + key + "'");
    return it->second;
  };
  auto maybe = [&](const char* key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  plan.axis = want("axis");
  if (plan.axis == "rc_gamma_grid") {
    plan.values = parse_values(want("rc_values"));
    plan.gamma_values = parse_values(want("gamma_values"));
  } else {
    plan.values = parse_values(want("values"));
  }
  plan.schemes = split(maybe("schemes", "rc_in"), ',');
  plan.engine = maybe("engine", "analytic");
  plan.optimizer = maybe("optimizer", "near");
  plan.fidelity = maybe("fidelity", "full");
  plan.realizations = static_cast<std::uint32_t>(std::stoul(maybe("realizations", "10000")));
  plan.seed = std::stoull(maybe("seed", "1"));
  plan.output = maybe("output", "");
  const std::string rel = maybe("scenario", "");
  if (!rel.empty()) {
    plan.scenario_path = rel.front() == '/' ? rel : dirname_of(path) + "/" + rel;
  }
  if (plan.values.empty()) throw CliError(2, "plan has an empty value list");
  for (std::size_t i = 1; i < plan.values.size(); ++i) {
    if (plan.values[i] <= plan.values[i - 1]) {
      throw CliError(2, "plan values must be strictly increasing");
    }
  }
  return plan;
}

struct SweepRow {
  std::string axis;
  double axis_value = 0;
  double gamma = 0;  // surface only
  std::string kind = "grid";
  std::string scheme;
  std::string engine;
  double throughput = 0;
  double std_error = 0;
  double epsilon = 0;
  int support = 0;
  std::string optimizer_method;
  double wall_ms = 0;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

std::string sweep_csv(const std::vector<SweepRow>& rows, bool surface, const GlobalOpts& g) {
  std::ostringstream out;
  if (surface) {
    out << "kind,gamma,rc_m,scheme,engine,units,throughput,stderr,epsilon,f_plus_cardinality,"
           "optimizer_method,wall_ms,scenario_hash,seed,status\n";
  } else {
    out << "axis,axis_value,scheme,engine,units,throughput,stderr,epsilon,f_plus_cardinality,"
           "optimizer_method,wall_ms,scenario_hash,seed,status\n";
  }
  const double scale = unit_scale(g);
  for (const auto& r : rows) {
    if (surface) {
      out << r.kind << ',' << format_double(r.gamma) << ',' << format_double(r.axis_value);
    } else {
      out << r.axis << ',' << format_double(r.axis_value);
    }
    out << ',' << r.scheme << ',' << r.engine << ',' << g.units << ','
        << format_double(r.throughput * scale) << ',' << format_double(r.std_error * scale) << ','
        << format_double(r.epsilon) << ',' << r.support << ',' << r.optimizer_method << ','
        << format_double(r.wall_ms) << ',' << r.scenario_hash << ',' << r.seed << ',' << r.status
        << "\n";
  }
  return out.str();
}

// One sweep point: clone, set axis keys, install the scheme cache, run the
// engine. Self-contained so points can run on any worker in any order.
SweepRow run_point(const ScenarioHandle& base, const SweepPlan& plan, const GlobalOpts& g,
                   const std::string& axis, double value, std::optional<double> gamma,
                   const std::string& scheme_tag, const std::string& engine) {
  SweepRow row;
  row.axis = axis;
  row.axis_value = value;
  row.gamma = gamma.value_or(0);
  row.scheme = scheme_tag;
  row.engine = engine;
  row.seed = plan.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioHandle scn = base.clone();
    if (gamma) scn.set("gamma", *gamma);
    scn.set(axis_key(axis), value);
    const SchemeParts scheme = parse_scheme_tag(scheme_tag);
    install_cache(scn, scheme, method_of(plan.optimizer));
    row.optimizer_method =
        scheme.family == "rc" ? (plan.optimizer == "near" ? "kkt_near_opt" : "gradient_projection")
                              : "fixed_formula";
    row.scenario_hash = scn.hash();

    const hc_fidelity fid =
        plan.fidelity == "matched" ? HC_FIDELITY_MATCHED : HC_FIDELITY_FULL;
    const EngineResult res =
        run_engine(scn, scheme.mode, engine, fid, plan.realizations, plan.seed, 1);
    row.throughput = res.throughput;
    row.std_error = res.std_error;
    row.epsilon = res.epsilon;
    row.support = res.support;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    row.status = "error: " + msg;
  }
  const auto stop = std::chrono::steady_clock::now();
  row.wall_ms =
      g.timings
          ? std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
                .count()
          : 0.0;
  return row;
}

int emit_rows(std::vector<SweepRow> rows, bool surface, const GlobalOpts& g,
              const std::string& out_path) {
  const std::string csv = sweep_csv(rows, surface, g);
  if (!out_path.empty()) {
    write_text_file(out_path, csv);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  } else {
    std::cout << csv;
  }
  for (const auto& r : rows) {
    if (r.status != "ok") return 4;  // partial failures
  }
  return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& plan_path, SweepPlan inline_plan,
              bool have_inline_axis) {
  SweepPlan plan = plan_path.empty() ? inline_plan : load_plan(plan_path);
  if (!plan_path.empty() && have_inline_axis) {
    throw CliError(2, "give either --plan or --axis/--values, not both");
  }
  if (!g.scenario_path.empty()) plan.scenario_path = g.scenario_path;
  if (plan.scenario_path.empty()) throw CliError(2, "sweep needs a scenario (--scenario or plan)");
  if (g.seed != 1) plan.seed = g.seed;
  if (plan.axis == "rc_gamma_grid") throw CliError(2, "use the surface subcommand for grid plans");

  ScenarioHandle base = ScenarioHandle::load(plan.scenario_path);

  std::vector<std::string> engines;
  const std::string engine = g.engine != "analytic" ? g.engine : plan.engine;
  if (engine == "both") {
    engines = {"analytic", "simulate"};
  } else if (engine == "analytic" || engine == "simulate") {
    engines = {engine};
  } else {
    throw CliError(2, "unknown engine '" + engine + "'");
  }

  struct Task {
    double value;
    std::string scheme;
    std::string engine;
  };
  std::vector<Task> tasks;
  for (double v : plan.values) {
    for (const auto& s : plan.schemes) {
      for (const auto& e : engines) tasks.push_back({v, s, e});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      rows[i] = run_point(base, plan, g, plan.axis, tasks[i].value, std::nullopt,
                          tasks[i].scheme, tasks[i].engine);
    }
  };
  int workers = g.workers > 0 ? g.workers : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  const std::string out_path = !g.out_path.empty() ? g.out_path : plan.output;
  return emit_rows(std::move(rows), false, g, out_path);
}

// ----------------------------------------------------------------- surface --

int cmd_surface(const GlobalOpts& g, const std::string& plan_path, SweepPlan inline_plan,
                bool have_inline) {
  SweepPlan plan = plan_path.empty() ? inline_plan : load_plan(plan_path);
  if (!plan_path.empty() && have_inline) {
    throw CliError(2, "give either --plan or --rc-values/--gamma-values, not both");
  }
  if (!g.scenario_path.empty()) plan.scenario_path = g.scenario_path;
  if (plan.scenario_path.empty()) throw CliError(2, "surface needs a scenario");
  if (g.seed != 1) plan.seed = g.seed;
  if (plan.gamma_values.empty()) throw CliError(2, "surface needs gamma_values");

  ScenarioHandle base = ScenarioHandle::load(plan.scenario_path);
  const std::string scheme = plan.schemes.empty() ? "rc_in" : plan.schemes.front();
  const std::string engine = g.engine != "analytic" ? g.engine : plan.engine;

  struct Task {
    double gamma;
    double rc;
  };
  std::vector<Task> tasks;
  for (double gamma : plan.gamma_values) {
    for (double rc : plan.values) tasks.push_back({gamma, rc});
  }
  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      rows[i] =
          run_point(base, plan, g, "rc", tasks[i].rc, tasks[i].gamma, scheme, engine);
    }
  };
  int workers = g.workers > 0 ? g.workers : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Ridge trace: per gamma, the rc with the largest throughput.
  std::vector<SweepRow> ordered;
  for (std::size_t gi = 0; gi < plan.gamma_values.size(); ++gi) {
    const SweepRow* best = nullptr;
    for (std::size_t ri = 0; ri < plan.values.size(); ++ri) {
      const SweepRow& row = rows[gi * plan.values.size() + ri];
      ordered.push_back(row);
      if (row.status == "ok" && (!best || row.throughput > best->throughput)) best = &row;
    }
    if (best) {
      SweepRow ridge = *best;
      ridge.kind = "ridge";
      ordered.push_back(ridge);
    }
  }

  const std::string out_path = !g.out_path.empty() ? g.out_path : plan.output;
  return emit_rows(std::move(ordered), true, g, out_path);
}

// ------------------------------------------------------------------ verify --

int cmd_verify(const GlobalOpts& g, const std::string& scheme_tag, const std::string& optimizer,
               std::uint32_t realizations, const std::string& export_raw) {
  ScenarioHandle scn = ScenarioHandle::load(g.scenario_path);
  hc_mode mode = mode_of(g.mode);
  if (!scheme_tag.empty()) {
    const SchemeParts parts = parse_scheme_tag(scheme_tag);
    mode = parts.mode;
    install_cache(scn, parts, method_of(optimizer));
  }
  if (hc_scenario_validate(scn.ptr) != HC_OK) {
    throw CliError(2, std::string("scenario invalid: ") + hc_last_error());
  }

  hc_report* ana = nullptr;
  check(hc_analyze(scn.ptr, mode, &ana), "analytic evaluation");
  ReportHandle ana_guard(ana);
  hc_report* matched = nullptr;
  check(hc_simulate(scn.ptr, mode, HC_FIDELITY_MATCHED, realizations, g.seed, g.workers, nullptr,
                    &matched),
        "matched simulation");
  ReportHandle matched_guard(matched);
  hc_report* full = nullptr;
  check(hc_simulate(scn.ptr, mode, HC_FIDELITY_FULL, realizations, g.seed, g.workers,
                    export_raw.empty() ? nullptr : export_raw.c_str(), &full),
        "full simulation");
  ReportHandle full_guard(full);

  const double scale = unit_scale(g);
  const double ra = hc_report_throughput(ana);
  const double rm = hc_report_throughput(matched);
  const double rf = hc_report_throughput(full);
  const double sem = hc_report_std_error(matched);
  const double sef = hc_report_std_error(full);

  std::ostringstream out;
  out << "kind,file,analytic,sim_matched,sim_matched_stderr,sim_matched_ci95,rel_err_matched,"
         "sim_full,sim_full_stderr,sim_full_ci95,rel_err_full\n";
  out << "aggregate,-," << format_double(ra * scale) << ',' << format_double(rm * scale) << ','
      << format_double(sem * scale) << ',' << format_double(1.96 * sem * scale) << ','
      << format_double(std::abs(ra - rm) / rf) << ',' << format_double(rf * scale) << ','
      << format_double(sef * scale) << ',' << format_double(1.96 * sef * scale) << ','
      << format_double(std::abs(ra - rf) / rf) << "\n";
  for (std::size_t i = 0; i < hc_report_files(ana); ++i) {
    hc_file_rates fa, fm, ff;
    check(hc_report_file(ana, i, &fa), "per-file rates");
    check(hc_report_file(matched, i, &fm), "per-file rates");
    check(hc_report_file(full, i, &ff), "per-file rates");
    const double va = fa.fm + fa.fs;
    const double vm = fm.fm + fm.fs;
    const double vf = ff.fm + ff.fs;
    out << "file," << (i + 1) << ',' << format_double(va * scale) << ','
        << format_double(vm * scale) << ',' << format_double(fm.se * scale) << ','
        << format_double(1.96 * fm.se * scale) << ','
        << format_double(vf != 0 ? std::abs(va - vm) / std::abs(vf) : 0.0) << ','
        << format_double(vf * scale) << ',' << format_double(ff.se * scale) << ','
        << format_double(1.96 * ff.se * scale) << ','
        << format_double(vf != 0 ? std::abs(va - vf) / std::abs(vf) : 0.0) << "\n";
  }

  std::cerr << "aggregate: analytic " << format_double(ra * scale) << ", matched "
            << format_double(rm * scale) << " (rel err " << format_double(std::abs(ra - rm) / rf)
            << "), full " << format_double(rf * scale) << " (rel err "
            << format_double(std::abs(ra - rf) / rf) << ")\n";
  if (!g.out_path.empty()) {
    write_text_file(g.out_path, out.str());
  } else {
    std::cout << out.str();
  }
  return 0;
}

// -------------------------------------------------------------------- plot --

int cmd_plot(const std::string& in_path, const std::string& out_path, const std::string& x_col,
             const std::string& y_col, const std::string& series_col, const std::string& title) {
  std::ifstream in(in_path);
  if (!in) throw CliError(2, "cannot open CSV: " + in_path);
  std::string header;
  if (!std::getline(in, header)) throw CliError(2, "empty CSV: " + in_path);
  const auto cols = split(header, ',');
  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return i;
    }
    throw CliError(2, "CSV misses column '" + name + "'");
  };
  const std::size_t xi = col_index(x_col);
  const std::size_t yi = col_index(y_col);
  const std::size_t si = col_index(series_col);
  std::size_t status_i = cols.size();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "status") status_i = i;
  }

  SvgChart chart;
  chart.title = title.empty() ? in_path : title;
  chart.x_label = x_col;
  chart.y_label = y_col;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < cols.size()) continue;
    if (status_i < cols.size() && fields[status_i] != "ok") continue;
    try {
      chart.series[fields[si]].emplace_back(std::stod(fields[xi]), std::stod(fields[yi]));
    } catch (const std::exception&) {
      continue;  // non-numeric rows (e.g. ridge annotations) are for other tools
    }
  }
  if (chart.series.empty()) throw CliError(2, "no plottable rows in " + in_path);
  for (auto& [name, pts] : chart.series) std::sort(pts.begin(), pts.end());
  write_text_file(out_path, chart.render());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace
}  // namespace hcli

int main(int argc, char** argv) {
  using namespace hcli;
  CLI::App app{"random-cache HetNet throughput analysis, simulation and optimization"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--scenario", g.scenario_path, "scenario file (flat key = value)");
  app.add_option("--seed", g.seed, "simulation seed");
  app.add_option("--out", g.out_path, "output file");
  app.add_option("--workers", g.workers, "worker threads (0 = hardware)");
  app.add_option("--engine", g.engine, "analytic | simulate | both")->default_str("analytic");
  app.add_option("--mode", g.mode, "in | mrt")->default_str("in");
  app.add_option("--units", g.units, "nats | bits")->default_str("nats");
  app.add_flag("--timings", g.timings, "record wall-clock columns (off keeps outputs byte-stable)");

  std::string scheme_tag, optimizer = "near";
  bool summary_only = false;
  auto* analyze = app.add_subcommand("analyze", "analytic throughput of one scenario");
  analyze->add_option("--scheme", scheme_tag, "rc_in, mpc_mrt, ... (default: cache from file)");
  analyze->add_option("--optimizer", optimizer, "near | local (rc schemes)");
  analyze->add_flag("--summary-only", summary_only, "suppress the per-file table");

  std::string opt_optimizer = "near";
  int probe_points = 11;
  auto* optimize = app.add_subcommand("optimize", "cache placement optimization");
  optimize->add_option("--optimizer", opt_optimizer, "near | local");
  optimize->add_option("--probe-points", probe_points, "convexity probe grid size");

  std::string plan_path;
  SweepPlan inline_plan;
  std::string inline_values, inline_schemes, inline_gammas, inline_rcs;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  sweep->add_option("--plan", plan_path, "sweep plan file");
  sweep->add_option("--axis", inline_plan.axis, "n1 | rc | c | gamma");
  sweep->add_option("--values", inline_values, "comma-separated axis values");
  sweep->add_option("--schemes", inline_schemes, "comma-separated scheme tags");
  sweep->add_option("--optimizer", inline_plan.optimizer, "near | local for rc schemes");
  sweep->add_option("--realizations", inline_plan.realizations, "simulation realizations");
  sweep->add_option("--fidelity", inline_plan.fidelity, "matched | full");

  auto* surface = app.add_subcommand("surface", "gamma x rc grid with ridge trace");
  surface->add_option("--plan", plan_path, "surface plan file (axis = rc_gamma_grid)");
  surface->add_option("--rc-values", inline_rcs, "comma-separated rc values");
  surface->add_option("--gamma-values", inline_gammas, "comma-separated gamma values");
  surface->add_option("--schemes", inline_schemes, "scheme tag (default rc_in)");
  surface->add_option("--optimizer", inline_plan.optimizer, "near | local");

  std::uint32_t verify_realizations = 10000;
  std::string export_raw;
  auto* verify = app.add_subcommand("verify", "analytic vs simulated throughput");
  verify->add_option("--scheme", scheme_tag, "scheme tag (default: cache from file)");
  verify->add_option("--optimizer", optimizer, "near | local");
  verify->add_option("--realizations", verify_realizations, "Monte-Carlo realizations");
  verify->add_option("--export-raw", export_raw, "per-sample CSV stream path");

  std::string plot_in, plot_x = "axis_value", plot_y = "throughput", plot_series = "scheme",
              plot_title;
  auto* plot = app.add_subcommand("plot", "render a sweep CSV as an SVG line chart");
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->add_option("--x", plot_x, "x column");
  plot->add_option("--y", plot_y, "y column");
  plot->add_option("--series", plot_series, "series column");
  plot->add_option("--title", plot_title, "chart title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      if (g.scenario_path.empty()) throw CliError(2, "analyze needs --scenario");
      return cmd_analyze(g, scheme_tag, optimizer, summary_only);
    }
    if (optimize->parsed()) {
      if (g.scenario_path.empty()) throw CliError(2, "optimize needs --scenario");
      return cmd_optimize(g, opt_optimizer, probe_points);
    }
    if (sweep->parsed()) {
      bool have_inline = !inline_plan.axis.empty();
      if (have_inline) {
        inline_plan.values = parse_values(inline_values);
        inline_plan.schemes = split(inline_schemes.empty() ? "rc_in" : inline_schemes, ',');
        inline_plan.engine = g.engine;
        inline_plan.seed = g.seed;
      }
      return cmd_sweep(g, plan_path, inline_plan, have_inline);
    }
    if (surface->parsed()) {
      bool have_inline = !inline_rcs.empty() || !inline_gammas.empty();
      if (have_inline) {
        inline_plan.axis = "rc_gamma_grid";
        inline_plan.values = parse_values(inline_rcs);
        inline_plan.gamma_values = parse_values(inline_gammas);
        inline_plan.schemes = split(inline_schemes.empty() ? "rc_in" : inline_schemes, ',');
        inline_plan.engine = g.engine;
        inline_plan.seed = g.seed;
      }
      return cmd_surface(g, plan_path, inline_plan, have_inline);
    }
    if (verify->parsed()) {
      if (g.scenario_path.empty()) throw CliError(2, "verify needs --scenario");
      return cmd_verify(g, scheme_tag, optimizer, verify_realizations, export_raw);
    }
    if (plot->parsed()) {
      if (g.out_path.empty()) throw CliError(2, "plot needs --out");
      return cmd_plot(plot_in, g.out_path, plot_x, plot_y, plot_series, plot_title);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
