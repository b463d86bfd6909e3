#include "hetcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetcache {

std::vector<double> zipf_popularity(int f, double gamma) {
  if (f < 1) throw std::invalid_argument("zipf_popularity: catalog size must be >= 1");
  if (gamma < 0.0) throw std::invalid_argument("zipf_popularity: gamma must be >= 0");

  std::vector<double> a(static_cast<std::size_t>(f));
  double norm = 0.0;
  for (int n = 1; n <= f; ++n) {
    const double w = std::pow(static_cast<double>(n), -gamma);
    a[static_cast<std::size_t>(n - 1)] = w;
    norm += w;
  }
  for (double& v : a) v /= norm;
  return a;
}

ContentCatalog make_zipf_catalog(int f, double gamma) {
  return ContentCatalog{f, gamma, zipf_popularity(f, gamma)};
}

SchemeId parse_scheme(const std::string& tag) {
  for (const auto& [name, id] : std::initializer_list<std::pair<const char*, SchemeId>>{
           {"rc_in", {CacheFamily::RC, Beamforming::IN}},
           {"rc_mrt", {CacheFamily::RC, Beamforming::MRT}},
           {"mpc_in", {CacheFamily::MPC, Beamforming::IN}},
           {"mpc_mrt", {CacheFamily::MPC, Beamforming::MRT}},
           {"uc_in", {CacheFamily::UC, Beamforming::IN}},
           {"uc_mrt", {CacheFamily::UC, Beamforming::MRT}},
           {"iidc_in", {CacheFamily::IIDC, Beamforming::IN}},
           {"iidc_mrt", {CacheFamily::IIDC, Beamforming::MRT}}}) {
    if (tag == name) return id;
  }
  throw std::invalid_argument("unknown scheme tag: " + tag);
}

std::string scheme_tag(SchemeId id) {
  std::string s;
  switch (id.family) {
    case CacheFamily::RC: s = "rc"; break;
    case CacheFamily::MPC: s = "mpc"; break;
    case CacheFamily::UC: s = "uc"; break;
    case CacheFamily::IIDC: s = "iidc"; break;
  }
  s += id.mode == Beamforming::IN ? "_in" : "_mrt";
  return s;
}

const std::vector<std::string>& all_scheme_tags() {
  static const std::vector<std::string> tags = {"rc_in",  "rc_mrt",  "mpc_in",  "mpc_mrt",
                                                "uc_in",  "uc_mrt",  "iidc_in", "iidc_mrt"};
  return tags;
}

CacheDistribution baseline_cache(CacheFamily family, const ContentCatalog& catalog, int c) {
  const int f = catalog.files;
  if (c < 1 || c > f) {
    throw std::invalid_argument("baseline_cache: capacity must satisfy 1 <= c <= f");
  }
  CacheDistribution cache;
  cache.capacity = c;
  cache.t.assign(static_cast<std::size_t>(f), 0.0);
  switch (family) {
    case CacheFamily::MPC:
      for (int n = 0; n < c; ++n) cache.t[static_cast<std::size_t>(n)] = 1.0;
      break;
    case CacheFamily::UC:
      std::fill(cache.t.begin(), cache.t.end(), static_cast<double>(c) / f);
      break;
    case CacheFamily::IIDC:
      for (int n = 0; n < f; ++n) {
        const double a = catalog.popularity[static_cast<std::size_t>(n)];
        cache.t[static_cast<std::size_t>(n)] = 1.0 - std::pow(1.0 - a, c);
      }
      break;
    case CacheFamily::RC:
      throw std::invalid_argument("baseline_cache: RC placement comes from the optimizer");
  }
  return cache;
}

namespace {

void check_config(const NetworkConfig& c, std::vector<std::string>& out) {
  if (!(c.lambda0 > 0)) out.push_back("lambda0 must be > 0");
  if (!(c.lambda1 > 0)) out.push_back("lambda1 must be > 0");
  if (!(c.lambda_u > 0)) out.push_back("lambda_u must be > 0");
  if (!(c.wm_hz > 0)) out.push_back("wm_hz must be > 0");
  if (!(c.ws_hz > 0)) out.push_back("ws_hz must be > 0");
  if (!(c.rc_m > 0)) out.push_back("rc_m must be > 0");
  if (!(c.alpha0 > 2)) out.push_back("alpha0 must be > 2 (interference integrals diverge otherwise)");
  if (!(c.alpha1 > 2)) out.push_back("alpha1 must be > 2 (interference integrals diverge otherwise)");
  if (c.n0 < 1) out.push_back("n0 must be >= 1");
  if (c.n1 < 1) out.push_back("n1 must be >= 1");
}

void check_catalog(const ContentCatalog& cat, std::vector<std::string>& out) {
  if (cat.files < 1) out.push_back("catalog size must be >= 1");
  if (cat.gamma < 0) out.push_back("zipf exponent must be >= 0");
  if (static_cast<int>(cat.popularity.size()) != cat.files) {
    out.push_back("popularity length must equal catalog size");
    return;
  }
  double sum = 0;
  bool sorted = true;
  bool nonneg = true;
  for (std::size_t i = 0; i < cat.popularity.size(); ++i) {
    sum += cat.popularity[i];
    if (cat.popularity[i] < 0) nonneg = false;
    if (i > 0 && cat.popularity[i] > cat.popularity[i - 1] + 1e-15) sorted = false;
  }
  if (std::abs(sum - 1.0) > 1e-12) out.push_back("popularity must sum to 1 within 1e-12");
  if (!sorted) out.push_back("popularity must be non-increasing");
  if (!nonneg) out.push_back("popularity entries must be >= 0");
}

void check_cache(const CacheDistribution& cache, int files, std::vector<std::string>& out) {
  if (cache.capacity < 1 || cache.capacity > files) {
    out.push_back("cache capacity must satisfy 1 <= c <= f");
  }
  if (static_cast<int>(cache.t.size()) != files) {
    out.push_back("cache vector length must equal catalog size");
    return;
  }
  for (std::size_t i = 0; i < cache.t.size(); ++i) {
    if (!(cache.t[i] >= 0.0 && cache.t[i] <= 1.0)) {
      out.push_back("t[" + std::to_string(i + 1) + "] must lie in [0,1]");
      break;
    }
  }
  if (cache.sum() > cache.capacity * (1.0 + 1e-9) + 1e-12) {
    out.push_back("sum(t) must not exceed cache capacity");
  }
}

}  // namespace

ValidationReport validate(const NetworkConfig& config, const ContentCatalog& catalog,
                          const CacheDistribution& cache) {
  ValidationReport report;
  check_config(config, report.violations);
  check_catalog(catalog, report.violations);
  check_cache(cache, catalog.files, report.violations);
  return report;
}

ValidationReport validate(const Scenario& scenario) {
  ValidationReport report;
  check_config(scenario.config, report.violations);
  check_catalog(scenario.catalog, report.violations);
  if (scenario.cache_capacity < 1 || scenario.cache_capacity > scenario.catalog.files) {
    report.violations.push_back("cache capacity must satisfy 1 <= c <= f");
  }
  if (scenario.cache) {
    check_cache(*scenario.cache, scenario.catalog.files, report.violations);
    if (scenario.cache->capacity != scenario.cache_capacity) {
      report.violations.push_back("cache vector capacity disagrees with scenario capacity");
    }
  }
  return report;
}

Scenario validated(Scenario scenario) {
  auto report = validate(scenario);
  if (!report.ok()) throw ValidationError(std::move(report.violations));
  return scenario;
}

}  // namespace hetcache
