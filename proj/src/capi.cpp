#include "hetcache.h"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include "hetcache/analytic.hpp"
#include "hetcache/model.hpp"
#include "hetcache/optimize.hpp"
#include "hetcache/scenario_io.hpp"
#include "hetcache/simulate.hpp"
#include "hetcache/special.hpp"

using namespace hetcache;

struct hc_scenario {
  Scenario s;
};

struct hc_report {
  analytic::ThroughputReport r;
};

struct hc_opt_result {
  opt::OptimizeResult r;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class F>
hc_status guarded(F&& body) {
  try {
    body();
    return HC_OK;
  } catch (const ValidationError& e) {
    set_error(e.what());
    return HC_ERR_VALIDATION;
  } catch (const QuadratureError& e) {
    set_error(e.what());
    return HC_ERR_NUMERIC;
  } catch (const BracketError& e) {
    set_error(e.what());
    return HC_ERR_NUMERIC;
  } catch (const SimulationError& e) {
    set_error(e.what());
    return HC_ERR_NUMERIC;
  } catch (const IoError& e) {
    set_error(e.what());
    return HC_ERR_IO;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return HC_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HC_ERR_UNKNOWN;
  } catch (...) {
    set_error("unknown failure");
    return HC_ERR_UNKNOWN;
  }
}

hc_status need(bool cond, const char* msg) {
  if (cond) return HC_OK;
  set_error(msg);
  return HC_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* hc_status_name(hc_status status) {
  switch (status) {
    case HC_OK: return "ok";
    case HC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HC_ERR_VALIDATION: return "validation failure";
    case HC_ERR_NUMERIC: return "numerical failure";
    case HC_ERR_IO: return "io failure";
    case HC_ERR_UNKNOWN: return "unknown failure";
  }
  return "unknown failure";
}

const char* hc_last_error(void) { return g_last_error.c_str(); }

hc_status hc_scenario_load(const char* path, hc_scenario** out) {
  if (auto st = need(path && out, "hc_scenario_load: null argument"); st != HC_OK) return st;
  return guarded([&] { *out = new hc_scenario{load_scenario(path)}; });
}

hc_status hc_scenario_parse(const char* text, hc_scenario** out) {
  if (auto st = need(text && out, "hc_scenario_parse: null argument"); st != HC_OK) return st;
  return guarded([&] { *out = new hc_scenario{parse_scenario(text)}; });
}

hc_status hc_scenario_clone(const hc_scenario* s, hc_scenario** out) {
  if (auto st = need(s && out, "hc_scenario_clone: null argument"); st != HC_OK) return st;
  return guarded([&] { *out = new hc_scenario{s->s}; });
}

void hc_scenario_free(hc_scenario* s) { delete s; }

hc_status hc_scenario_set(hc_scenario* s, const char* key, double value) {
  if (auto st = need(s && key, "hc_scenario_set: null argument"); st != HC_OK) return st;
  return guarded([&] {
    Scenario& sc = s->s;
    const std::string k = key;
    auto as_int = [&](const char* what) {
      const int i = static_cast<int>(value);
      if (static_cast<double>(i) != value) {
        throw std::invalid_argument(std::string(what) + " must be an integer");
      }
      return i;
    };
    if (k == "lambda0") sc.config.lambda0 = value;
    else if (k == "lambda1") sc.config.lambda1 = value;
    else if (k == "lambda_u") sc.config.lambda_u = value;
    else if (k == "n0") sc.config.n0 = as_int("n0");
    else if (k == "n1") sc.config.n1 = as_int("n1");
    else if (k == "wm_hz") sc.config.wm_hz = value;
    else if (k == "ws_hz") sc.config.ws_hz = value;
    else if (k == "alpha0") sc.config.alpha0 = value;
    else if (k == "alpha1") sc.config.alpha1 = value;
    else if (k == "rc_m") sc.config.rc_m = value;
    else if (k == "c") sc.cache_capacity = as_int("c");
    else if (k == "f") {
      sc.catalog = make_zipf_catalog(as_int("f"), sc.catalog.gamma);
      sc.cache.reset();
    } else if (k == "gamma") {
      sc.catalog = make_zipf_catalog(sc.catalog.files, value);
      sc.cache.reset();
    } else {
      throw std::invalid_argument("unknown scenario key '" + k + "'");
    }
  });
}

hc_status hc_scenario_get(const hc_scenario* s, const char* key, double* out) {
  if (auto st = need(s && key && out, "hc_scenario_get: null argument"); st != HC_OK) return st;
  return guarded([&] {
    const Scenario& sc = s->s;
    const std::string k = key;
    if (k == "lambda0") *out = sc.config.lambda0;
    else if (k == "lambda1") *out = sc.config.lambda1;
    else if (k == "lambda_u") *out = sc.config.lambda_u;
    else if (k == "n0") *out = sc.config.n0;
    else if (k == "n1") *out = sc.config.n1;
    else if (k == "wm_hz") *out = sc.config.wm_hz;
    else if (k == "ws_hz") *out = sc.config.ws_hz;
    else if (k == "alpha0") *out = sc.config.alpha0;
    else if (k == "alpha1") *out = sc.config.alpha1;
    else if (k == "rc_m") *out = sc.config.rc_m;
    else if (k == "f") *out = sc.catalog.files;
    else if (k == "gamma") *out = sc.catalog.gamma;
    else if (k == "c") *out = sc.cache_capacity;
    else throw std::invalid_argument("unknown scenario key '" + k + "'");
  });
}

hc_status hc_scenario_set_cache(hc_scenario* s, const double* t, size_t len) {
  if (auto st = need(s && t && len > 0, "hc_scenario_set_cache: null argument"); st != HC_OK) {
    return st;
  }
  return guarded([&] {
    if (static_cast<int>(len) != s->s.catalog.files) {
      throw std::invalid_argument("cache vector length must equal the catalog size");
    }
    CacheDistribution cache;
    cache.capacity = s->s.cache_capacity;
    cache.t.assign(t, t + len);
    s->s.cache = std::move(cache);
  });
}

hc_status hc_scenario_set_scheme(hc_scenario* s, const char* family) {
  if (auto st = need(s && family, "hc_scenario_set_scheme: null argument"); st != HC_OK) return st;
  return guarded([&] {
    const std::string f = family;
    CacheFamily fam;
    if (f == "mpc") fam = CacheFamily::MPC;
    else if (f == "uc") fam = CacheFamily::UC;
    else if (f == "iidc") fam = CacheFamily::IIDC;
    else throw std::invalid_argument("unknown cache family '" + f + "' (want mpc, uc or iidc)");
    s->s.cache = baseline_cache(fam, s->s.catalog, s->s.cache_capacity);
  });
}

hc_status hc_scenario_clear_cache(hc_scenario* s) {
  if (auto st = need(s != nullptr, "hc_scenario_clear_cache: null argument"); st != HC_OK) {
    return st;
  }
  s->s.cache.reset();
  return HC_OK;
}

hc_status hc_scenario_get_cache(const hc_scenario* s, double* t, size_t cap, size_t* len) {
  if (auto st = need(s && len, "hc_scenario_get_cache: null argument"); st != HC_OK) return st;
  return guarded([&] {
    if (!s->s.cache) throw std::invalid_argument("scenario holds no cache vector");
    *len = s->s.cache->t.size();
    if (t) {
      const size_t n = std::min(cap, s->s.cache->t.size());
      std::memcpy(t, s->s.cache->t.data(), n * sizeof(double));
    }
  });
}

hc_status hc_scenario_serialize(const hc_scenario* s, char* buf, size_t cap, size_t* len) {
  if (auto st = need(s && len, "hc_scenario_serialize: null argument"); st != HC_OK) return st;
  return guarded([&] {
    const std::string text = serialize_scenario(s->s);
    *len = text.size();
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

hc_status hc_scenario_hash(const hc_scenario* s, char buf[17]) {
  if (auto st = need(s && buf, "hc_scenario_hash: null argument"); st != HC_OK) return st;
  return guarded([&] {
    const std::string h = scenario_hash(s->s);
    std::memcpy(buf, h.c_str(), 17);
  });
}

hc_status hc_scenario_validate(const hc_scenario* s) {
  if (auto st = need(s != nullptr, "hc_scenario_validate: null argument"); st != HC_OK) return st;
  return guarded([&] { (void)validated(s->s); });
}

hc_status hc_zipf_popularity(size_t f, double gamma, double* out) {
  if (auto st = need(out != nullptr, "hc_zipf_popularity: null output"); st != HC_OK) return st;
  return guarded([&] {
    const auto a = zipf_popularity(static_cast<int>(f), gamma);
    std::memcpy(out, a.data(), a.size() * sizeof(double));
  });
}

hc_status hc_epsilon(int n1, double kbar, double* out) {
  if (auto st = need(out != nullptr, "hc_epsilon: null output"); st != HC_OK) return st;
  return guarded([&] { *out = analytic::residual_ratio(n1, kbar); });
}

hc_status hc_hit_probability(double t_n, double lambda1, double rc, double* out) {
  if (auto st = need(out != nullptr, "hc_hit_probability: null output"); st != HC_OK) return st;
  return guarded([&] { *out = analytic::hit_probability(t_n, lambda1, rc); });
}

hc_status hc_incomplete_beta(double x, double y, double z, double* out) {
  if (auto st = need(out != nullptr, "hc_incomplete_beta: null output"); st != HC_OK) return st;
  return guarded([&] { *out = special::incomplete_beta(x, y, z); });
}

hc_status hc_kbar(const hc_scenario* s, double* out) {
  if (auto st = need(s && out, "hc_kbar: null argument"); st != HC_OK) return st;
  *out = s->s.config.kbar();
  return HC_OK;
}

hc_status hc_convex_regime_radius(const hc_scenario* s, double* out) {
  if (auto st = need(s && out, "hc_convex_regime_radius: null argument"); st != HC_OK) return st;
  return guarded([&] { *out = s->s.config.convex_regime_rc(); });
}

hc_status hc_analyze(const hc_scenario* s, hc_mode mode, hc_report** out) {
  if (auto st = need(s && out, "hc_analyze: null argument"); st != HC_OK) return st;
  return guarded([&] {
    *out = new hc_report{analytic::throughput(
        s->s, mode == HC_MODE_MRT ? Beamforming::MRT : Beamforming::IN, QuadratureSpec{})};
  });
}

hc_status hc_simulate(const hc_scenario* s, hc_mode mode, hc_fidelity fidelity,
                      uint32_t realizations, uint64_t seed, int workers,
                      const char* raw_export_path, hc_report** out) {
  if (auto st = need(s && out, "hc_simulate: null argument"); st != HC_OK) return st;
  return guarded([&] {
    sim::SimulationSpec spec;
    spec.fidelity = fidelity == HC_FIDELITY_MATCHED ? sim::Fidelity::Matched : sim::Fidelity::Full;
    spec.realizations = realizations;
    spec.seed = seed;
    spec.workers = workers;
    if (raw_export_path) spec.raw_export_path = raw_export_path;
    *out = new hc_report{sim::estimate_throughput(
        s->s, spec, mode == HC_MODE_MRT ? Beamforming::MRT : Beamforming::IN)};
  });
}

double hc_report_throughput(const hc_report* r) { return r ? r->r.throughput : 0.0; }
double hc_report_std_error(const hc_report* r) { return r ? r->r.std_error : 0.0; }
double hc_report_epsilon(const hc_report* r) { return r ? r->r.epsilon : 0.0; }
double hc_report_kbar(const hc_report* r) { return r ? r->r.kbar : 0.0; }
int hc_report_support_size(const hc_report* r) { return r ? r->r.support_size : 0; }
size_t hc_report_files(const hc_report* r) { return r ? r->r.files.size() : 0; }

hc_status hc_report_file(const hc_report* r, size_t index, hc_file_rates* out) {
  if (auto st = need(r && out, "hc_report_file: null argument"); st != HC_OK) return st;
  if (auto st = need(index < r->r.files.size(), "hc_report_file: index out of range");
      st != HC_OK) {
    return st;
  }
  const auto& f = r->r.files[index];
  *out = hc_file_rates{f.ps, f.pm, f.r0, f.r1, f.fm, f.fs, f.se};
  return HC_OK;
}

const char* hc_report_provenance(const hc_report* r) {
  return r ? r->r.provenance.c_str() : "";
}

size_t hc_report_warnings(const hc_report* r) { return r ? r->r.warnings.size() : 0; }

const char* hc_report_warning(const hc_report* r, size_t index) {
  if (!r || index >= r->r.warnings.size()) return "";
  return r->r.warnings[index].c_str();
}

void hc_report_free(hc_report* r) { delete r; }

hc_status hc_optimize(const hc_scenario* s, hc_opt_method method, hc_mode mode,
                      hc_opt_result** out) {
  if (auto st = need(s && out, "hc_optimize: null argument"); st != HC_OK) return st;
  return guarded([&] {
    opt::OptimizerSpec spec;
    spec.method = method == HC_OPT_GRADIENT_PROJECTION ? opt::Method::GradientProjection
                                                       : opt::Method::KktNearOpt;
    *out = new hc_opt_result{opt::optimize(
        s->s, spec, mode == HC_MODE_MRT ? Beamforming::MRT : Beamforming::IN, QuadratureSpec{})};
  });
}

double hc_opt_objective(const hc_opt_result* r) { return r ? r->r.objective : 0.0; }
double hc_opt_nu_star(const hc_opt_result* r) {
  return r ? r->r.nu_star : std::numeric_limits<double>::quiet_NaN();
}
int hc_opt_iterations(const hc_opt_result* r) { return r ? r->r.iterations : 0; }
int hc_opt_converged(const hc_opt_result* r) { return r && r->r.converged ? 1 : 0; }
int hc_opt_heuristic(const hc_opt_result* r) { return r && r->r.heuristic ? 1 : 0; }

size_t hc_opt_cache(const hc_opt_result* r, double* t, size_t cap) {
  if (!r) return 0;
  if (t) {
    const size_t n = std::min(cap, r->r.cache.t.size());
    std::memcpy(t, r->r.cache.t.data(), n * sizeof(double));
  }
  return r->r.cache.t.size();
}

size_t hc_opt_trace(const hc_opt_result* r, double* objectives, size_t cap) {
  if (!r) return 0;
  if (objectives) {
    const size_t n = std::min(cap, r->r.trace.size());
    std::memcpy(objectives, r->r.trace.data(), n * sizeof(double));
  }
  return r->r.trace.size();
}

size_t hc_opt_warnings(const hc_opt_result* r) { return r ? r->r.warnings.size() : 0; }

const char* hc_opt_warning(const hc_opt_result* r, size_t index) {
  if (!r || index >= r->r.warnings.size()) return "";
  return r->r.warnings[index].c_str();
}

void hc_opt_result_free(hc_opt_result* r) { delete r; }

hc_status hc_convexity_probe(const hc_scenario* s, const double* grid, size_t grid_len,
                             hc_convexity* out) {
  if (auto st = need(s && grid && grid_len > 0 && out, "hc_convexity_probe: null argument");
      st != HC_OK) {
    return st;
  }
  return guarded([&] {
    const std::vector<double> g(grid, grid + grid_len);
    const auto rep = opt::convexity_probe(s->s, g, QuadratureSpec{});
    out->inside_convex_regime = rep.inside_convex_regime ? 1 : 0;
    out->all_nonpositive = rep.all_nonpositive ? 1 : 0;
    out->fm_second_at_zero = rep.fm_second_at_zero;
    out->min_fs_second = *std::min_element(rep.fs_second.begin(), rep.fs_second.end());
    out->max_fs_second = *std::max_element(rep.fs_second.begin(), rep.fs_second.end());
  });
}

}  // extern "C"
