#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/errors.hpp"

namespace hetcache {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Physical-layer parameters of the two-tier network. Immutable after
// construction; shared freely across threads.
struct NetworkConfig {
  double lambda0 = 0;   // MBS density, points per m^2
  double lambda1 = 0;   // SBS density, points per m^2
  double lambda_u = 0;  // user density, points per m^2
  int n0 = 1;           // MBS antennas
  int n1 = 1;           // SBS antennas
  double wm_hz = 0;     // MBS per-user bandwidth
  double ws_hz = 0;     // SBS per-user bandwidth
  double alpha0 = 4;    // MBS path-loss exponent (> 2)
  double alpha1 = 4;    // SBS path-loss exponent (> 2)
  double rc_m = 0;      // cooperation / service radius

  // Mean number of nulling requests a small cell sees.
  double kbar() const { return kPi * rc_m * rc_m * lambda1; }
  // Radius bound sqrt(2/(pi lambda1)) under which the SBS objective is concave.
  double convex_regime_rc() const { return std::sqrt(2.0 / (kPi * lambda1)); }
  bool inside_convex_regime() const { return rc_m <= convex_regime_rc() && n1 > 4; }
};

// File catalog with Zipf-ranked request popularity.
struct ContentCatalog {
  int files = 0;
  double gamma = 0;
  std::vector<double> popularity;  // descending, sums to 1
};

// a_n = n^(-gamma) / sum_i i^(-gamma). Throws on f < 1 or gamma < 0.
std::vector<double> zipf_popularity(int f, double gamma);

ContentCatalog make_zipf_catalog(int f, double gamma);

// Per-file caching probabilities under a capacity budget.
struct CacheDistribution {
  std::vector<double> t;
  int capacity = 0;

  double sum() const {
    double s = 0;
    for (double v : t) s += v;
    return s;
  }
  int support_size() const {  // |F+|
    int n = 0;
    for (double v : t) n += v > 0.0;
    return n;
  }
};

enum class CacheFamily { RC, MPC, UC, IIDC };
enum class Beamforming { IN, MRT };

struct SchemeId {
  CacheFamily family = CacheFamily::RC;
  Beamforming mode = Beamforming::IN;
};

// Tags "rc_in", "mpc_mrt", ... Throws std::invalid_argument on unknown tags.
SchemeId parse_scheme(const std::string& tag);
std::string scheme_tag(SchemeId id);
const std::vector<std::string>& all_scheme_tags();

// Baseline cache placements. MPC fills the c most popular files, UC spreads
// the budget uniformly, IIDC uses the marginal of c popularity-weighted
// i.i.d. draws, t_n = 1 - (1 - a_n)^c. RC is not a formula; it comes from the
// optimizer.
CacheDistribution baseline_cache(CacheFamily family, const ContentCatalog& catalog, int c);

struct Scenario {
  NetworkConfig config;
  ContentCatalog catalog;
  int cache_capacity = 0;                 // C, always present
  std::optional<CacheDistribution> cache; // filled by file `t`, a scheme, or the optimizer

  Scenario with_cache(CacheDistribution c) const {
    Scenario s = *this;
    s.cache_capacity = c.capacity;
    s.cache = std::move(c);
    return s;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const NetworkConfig& config, const ContentCatalog& catalog,
                          const CacheDistribution& cache);
ValidationReport validate(const Scenario& scenario);

// Returns the scenario unchanged or throws ValidationError listing every
// violated invariant.
Scenario validated(Scenario scenario);

}  // namespace hetcache
