#include "hetcache/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hetcache/scenario_io.hpp"
#include "hetcache/special.hpp"

namespace hetcache::sim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

enum StreamTag : std::uint64_t {
  kTagMbsPoints = 1,
  kTagSbsPoints,
  kTagUserPoints,
  kTagMbsGain,
  kTagSbsGain,
  kTagSignal0,
  kTagSignal1,
  kTagKServing,
  kTagGrant,
  kTagMark,
  kTagSched,
  kTagTypicalFile,
};

double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;  // strictly inside (0,1)
}

std::uint64_t hash_words(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d = 0,
                         std::uint64_t e = 0) {
  std::uint64_t h = mix64(a + kGolden);
  h = mix64(h ^ (b + kGolden));
  h = mix64(h ^ (c + kGolden));
  h = mix64(h ^ (d + kGolden));
  h = mix64(h ^ (e + kGolden));
  return h;
}

double dist2(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

double path_gain(double r2, double alpha) { return std::pow(r2, -0.5 * alpha); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t realization, std::uint64_t tag,
               std::uint64_t salt) {
  state_ = hash_words(seed, realization, tag, salt);
}

std::uint64_t Stream::bits() {
  state_ += kGolden;
  return mix64(state_);
}

double Stream::uniform() { return to_unit(bits()); }

double Stream::exponential() { return -std::log(uniform()); }

double Stream::gamma_int(int shape) {
  double acc = 0;
  for (int i = 0; i < shape; ++i) acc += exponential();
  return acc;
}

std::uint32_t Stream::poisson(double mean) {
  if (mean < 0) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0) return 0;
  if (mean < 10.0) {
    // Arrival counting of a unit-rate process on [0, mean].
    std::uint32_t n = 0;
    for (double s = exponential(); s <= mean; s += exponential()) ++n;
    return n;
  }
  // Hoermann's PTRS transformed rejection; exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint32_t>(kf);
    if (kf < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0)) {
      return static_cast<std::uint32_t>(kf);
    }
  }
}

double default_window_radius(const NetworkConfig& config) {
  return std::max(10.0 * config.rc_m, 5.0 / std::sqrt(config.lambda0));
}

std::vector<Point> sample_ppp(double density, double window_radius, Stream& rng) {
  if (density < 0 || window_radius < 0) {
    throw std::invalid_argument("sample_ppp: density and window_radius must be >= 0");
  }
  const double mean = density * kPi * window_radius * window_radius;
  const std::uint32_t count = rng.poisson(mean);
  std::vector<Point> pts(count);
  for (auto& p : pts) {
    const double r = window_radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * kPi * rng.uniform();
    p.x = r * std::cos(theta);
    p.y = r * std::sin(theta);
    p.r2 = r * r;
  }
  return pts;
}

namespace {

// Points for one realization, drawn annulus by annulus (annulus width =
// the scenario's guard radius) and thinned to the requested window. Windows
// sharing a (seed, realization) then share every point of their common
// region, so window-sensitivity studies compare the same world plus a ring.
std::vector<Point> sample_ppp_nested(double density, double window_radius, double annulus_width,
                                     std::uint64_t seed, std::uint64_t realization,
                                     std::uint64_t tag) {
  std::vector<Point> pts;
  for (int ring = 0; ring * annulus_width < window_radius; ++ring) {
    const double inner = ring * annulus_width;
    const double outer = inner + annulus_width;
    Stream rng(seed, realization, tag, static_cast<std::uint64_t>(ring) + 1);
    const double mean = density * kPi * (outer * outer - inner * inner);
    const std::uint32_t count = rng.poisson(mean);
    for (std::uint32_t i = 0; i < count; ++i) {
      const double r2 = inner * inner + (outer * outer - inner * inner) * rng.uniform();
      const double theta = 2.0 * kPi * rng.uniform();
      if (r2 > window_radius * window_radius) continue;  // thinning keeps it a PPP
      Point p;
      p.r2 = r2;
      const double r = std::sqrt(r2);
      p.x = r * std::cos(theta);
      p.y = r * std::sin(theta);
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

NetworkRealization::NetworkRealization(const Scenario& scenario, const SimulationSpec& spec,
                                       Beamforming mode, std::uint32_t index)
    : scenario_(&scenario),
      mode_(mode),
      fidelity_(spec.fidelity),
      seed_(spec.seed),
      index_(index) {
  const NetworkConfig& cfg = scenario.config;
  window_ = spec.window_radius > 0 ? spec.window_radius : default_window_radius(cfg);
  rc_ = cfg.rc_m;
  rc2_ = rc_ * rc_;
  alpha0_ = cfg.alpha0;
  alpha1_ = cfg.alpha1;
  n1_ = cfg.n1;

  const double guard = default_window_radius(cfg);
  mbs_ = sample_ppp_nested(cfg.lambda0, window_, guard, seed_, index_, kTagMbsPoints);
  if (mbs_.size() < 2) {
    throw SimulationError("simulation window holds fewer than two MBSs; enlarge window_radius");
  }
  sbs_ = sample_ppp_nested(cfg.lambda1, window_, guard, seed_, index_, kTagSbsPoints);

  mbs_gain_.resize(mbs_.size());
  mbs_nearest_ = 0;
  for (std::size_t i = 0; i < mbs_.size(); ++i) {
    mbs_gain_[i] = -std::log(to_unit(hash_words(seed_, index_, kTagMbsGain, i)));
    if (mbs_[i].r2 < mbs_[mbs_nearest_].r2) mbs_nearest_ = static_cast<std::int32_t>(i);
  }
  mbs_interference_ = 0;
  for (std::size_t i = 0; i < mbs_.size(); ++i) {
    if (static_cast<std::int32_t>(i) == mbs_nearest_) continue;
    mbs_interference_ += mbs_gain_[i] * path_gain(mbs_[i].r2, alpha0_);
  }

  sbs_gain_.resize(sbs_.size());
  far_interference_ = 0;
  for (std::size_t i = 0; i < sbs_.size(); ++i) {
    sbs_gain_[i] = -std::log(to_unit(hash_words(seed_, index_, kTagSbsGain, i)));
    if (sbs_[i].r2 <= rc2_) {
      in_rc_.push_back(static_cast<std::int32_t>(i));
    } else {
      far_interference_ += sbs_gain_[i] * path_gain(sbs_[i].r2, alpha1_);
    }
  }
  std::sort(in_rc_.begin(), in_rc_.end(),
            [this](std::int32_t a, std::int32_t b) { return sbs_[a].r2 < sbs_[b].r2; });

  if (fidelity_ == Fidelity::Full && mode_ == Beamforming::IN) build_users(scenario);
}

bool NetworkRealization::cache_mark(std::size_t sbs_index, int file) const {
  const auto& t = scenario_->cache->t;
  return to_unit(hash_words(seed_, index_, kTagMark, sbs_index,
                            static_cast<std::uint64_t>(file))) <
         t[static_cast<std::size_t>(file)];
}

void NetworkRealization::build_users(const Scenario& scenario) {
  const NetworkConfig& cfg = scenario.config;
  // Users beyond 4 rc cannot affect any request count within rc of the
  // origin: requesters sit within rc of a counted SBS (<= 2 rc), and they are
  // scheduled by SBSs within rc of themselves (<= 3 rc) whose cells reach at
  // most rc further.
  const double zone = std::min(window_, 4.0 * rc_);
  const double sched_radius = std::min(window_, 3.0 * rc_);

  // Cell grid over SBSs reachable from users in the zone.
  const double extent = zone + rc_;
  const int cells = std::max(1, static_cast<int>(std::ceil(2.0 * extent / rc_)));
  std::vector<std::vector<std::int32_t>> grid(static_cast<std::size_t>(cells) * cells);
  auto cell_index = [&](double x, double y) -> int {
    int gx = static_cast<int>((x + extent) / rc_);
    int gy = static_cast<int>((y + extent) / rc_);
    gx = std::clamp(gx, 0, cells - 1);
    gy = std::clamp(gy, 0, cells - 1);
    return gy * cells + gx;
  };
  for (std::size_t i = 0; i < sbs_.size(); ++i) {
    if (std::abs(sbs_[i].x) <= extent && std::abs(sbs_[i].y) <= extent) {
      grid[static_cast<std::size_t>(cell_index(sbs_[i].x, sbs_[i].y))].push_back(
          static_cast<std::int32_t>(i));
    }
  }

  std::vector<double> cdf(scenario.catalog.popularity.size());
  double acc = 0;
  for (std::size_t n = 0; n < cdf.size(); ++n) {
    acc += scenario.catalog.popularity[n];
    cdf[n] = acc;
  }

  Stream urng(seed_, index_, kTagUserPoints);
  const std::vector<Point> users = sample_ppp(cfg.lambda_u, zone, urng);

  // Association cells of the SBSs that need a scheduled user.
  std::vector<std::int32_t> slot_of_sbs(sbs_.size(), -1);
  std::vector<std::int32_t> sched_sbs;
  const double sched_r2 = sched_radius * sched_radius;
  for (std::size_t i = 0; i < sbs_.size(); ++i) {
    if (sbs_[i].r2 <= sched_r2) {
      slot_of_sbs[i] = static_cast<std::int32_t>(sched_sbs.size());
      sched_sbs.push_back(static_cast<std::int32_t>(i));
    }
  }
  std::vector<std::vector<std::int32_t>> members(sched_sbs.size());

  for (std::size_t iu = 0; iu < users.size(); ++iu) {
    const Point& u = users[iu];
    const double uf = urng.uniform();
    const int file = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), uf) - cdf.begin());

    const int cgx = static_cast<int>((u.x + extent) / rc_);
    const int cgy = static_cast<int>((u.y + extent) / rc_);
    std::int32_t best = -1;
    double best_d2 = rc2_;
    for (int gy = std::max(0, cgy - 1); gy <= std::min(cells - 1, cgy + 1); ++gy) {
      for (int gx = std::max(0, cgx - 1); gx <= std::min(cells - 1, cgx + 1); ++gx) {
        for (std::int32_t i : grid[static_cast<std::size_t>(gy * cells + gx)]) {
          const double d2 = dist2(u, sbs_[static_cast<std::size_t>(i)]);
          if (d2 <= best_d2 && cache_mark(static_cast<std::size_t>(i), file)) {
            if (best < 0 || d2 < best_d2 || (d2 == best_d2 && i < best)) {
              best = i;
              best_d2 = d2;
            }
          }
        }
      }
    }
    if (best >= 0 && slot_of_sbs[static_cast<std::size_t>(best)] >= 0) {
      members[static_cast<std::size_t>(slot_of_sbs[static_cast<std::size_t>(best)])].push_back(
          static_cast<std::int32_t>(iu));
    }
  }

  // TDMA: one uniformly chosen associated user per SBS. Cells with no
  // sampled user keep their full-load interference but contribute no
  // requests near the origin (their stand-in user is far away).
  for (std::size_t slot = 0; slot < sched_sbs.size(); ++slot) {
    if (members[slot].empty()) continue;
    const std::int32_t sbs = sched_sbs[slot];
    const double pick =
        to_unit(hash_words(seed_, index_, kTagSched, static_cast<std::uint64_t>(sbs)));
    const std::size_t which =
        std::min(members[slot].size() - 1,
                 static_cast<std::size_t>(pick * static_cast<double>(members[slot].size())));
    sched_users_.push_back(users[static_cast<std::size_t>(members[slot][which])]);
    sched_owner_.push_back(sbs);
  }

  kbg_.assign(in_rc_.size(), 0);
  bg_user_of_in_rc_.assign(in_rc_.size(), -1);
  for (std::size_t v = 0; v < sched_users_.size(); ++v) {
    for (std::size_t r = 0; r < in_rc_.size(); ++r) {
      const std::int32_t x = in_rc_[r];
      if (sched_owner_[v] == x) {
        bg_user_of_in_rc_[r] = static_cast<std::int32_t>(v);
        continue;  // a user never requests nulling from its own server
      }
      if (dist2(sched_users_[v], sbs_[static_cast<std::size_t>(x)]) <= rc2_) ++kbg_[r];
    }
  }
}

Serving NetworkRealization::associate(int file) const {
  Serving s;
  for (std::size_t rank = 0; rank < in_rc_.size(); ++rank) {
    const std::int32_t idx = in_rc_[rank];
    if (cache_mark(static_cast<std::size_t>(idx), file)) {
      s.tier = Tier::SBS;
      s.index = idx;
      s.distance = std::sqrt(sbs_[static_cast<std::size_t>(idx)].r2);
      s.phi1_inner = static_cast<std::int32_t>(rank);
      s.phi1_annulus = static_cast<std::int32_t>(in_rc_.size() - rank - 1);
      s.phi1_outer = static_cast<std::int64_t>(sbs_.size() - in_rc_.size());
      return s;
    }
  }
  s.tier = Tier::MBS;
  s.index = mbs_nearest_;
  s.distance = std::sqrt(mbs_[static_cast<std::size_t>(mbs_nearest_)].r2);
  s.phi1_inner = 0;
  s.phi1_annulus = static_cast<std::int32_t>(in_rc_.size());
  s.phi1_outer = static_cast<std::int64_t>(sbs_.size() - in_rc_.size());
  return s;
}

Bookkeeping NetworkRealization::in_bookkeeping(const Serving& serving, int file) const {
  Bookkeeping b;
  b.max_grant = n1_ - 1;
  if (serving.tier == Tier::MBS) return b;

  b.in_rc.reserve(in_rc_.size());
  std::size_t serving_rank = in_rc_.size();
  for (std::size_t r = 0; r < in_rc_.size(); ++r) {
    if (in_rc_[r] == serving.index) {
      serving_rank = r;
    } else {
      b.in_rc.push_back(in_rc_[r]);
    }
  }
  if (mode_ == Beamforming::MRT) return b;  // no requests, no grants

  if (fidelity_ == Fidelity::Matched) {
    const double kbar = scenario_->config.kbar();
    Stream ks(seed_, index_, kTagKServing, static_cast<std::uint64_t>(serving.index));
    b.k_serving = static_cast<int>(ks.poisson(kbar));
    const double grant_p = 1.0 - analytic::residual_ratio(n1_, kbar);
    for (std::int32_t x : b.in_rc) {
      if (to_unit(hash_words(seed_, index_, kTagGrant, static_cast<std::uint64_t>(x))) <
          grant_p) {
        b.nulled.push_back(x);
      }
    }
    return b;
  }

  // Full fidelity: the background request field was materialized once; the
  // typical user replaces the serving cell's scheduled user.
  b.k_serving = serving_rank < kbg_.size() ? kbg_[serving_rank] : 0;
  const std::int32_t displaced =
      serving_rank < bg_user_of_in_rc_.size() ? bg_user_of_in_rc_[serving_rank] : -1;
  for (std::int32_t x : b.in_rc) {
    std::size_t rank = 0;
    while (rank < in_rc_.size() && in_rc_[rank] != x) ++rank;
    int kx = rank < kbg_.size() ? kbg_[rank] : 0;
    if (displaced >= 0) {
      const Point& v = sched_users_[static_cast<std::size_t>(displaced)];
      if (dist2(v, sbs_[static_cast<std::size_t>(x)]) <= rc2_) --kx;  // its requests vanish
    }
    kx += 1;  // the typical user's own request
    bool granted = kx <= b.max_grant;
    if (!granted) {
      const double p = static_cast<double>(b.max_grant) / kx;
      granted = to_unit(hash_words(seed_, index_, kTagGrant, static_cast<std::uint64_t>(x))) < p;
    }
    if (granted) b.nulled.push_back(x);
  }
  (void)file;
  return b;
}

SirSample NetworkRealization::sample_sir(const Serving& serving, const Bookkeeping& books,
                                         int file) const {
  SirSample out;
  out.tier = serving.tier;
  if (serving.tier == Tier::MBS) {
    Stream s0(seed_, index_, kTagSignal0);
    out.dof_used = scenario_->config.n0;
    out.signal_gain = s0.gamma_int(out.dof_used);
    out.interference = mbs_interference_;
    if (out.interference <= 0) throw SimulationError("zero macro interference; window too small");
    out.sir = out.signal_gain *
              path_gain(mbs_[static_cast<std::size_t>(serving.index)].r2, alpha0_) /
              out.interference;
    return out;
  }

  const int shape =
      mode_ == Beamforming::MRT ? n1_ : std::max(n1_ - books.k_serving, 1);
  Stream s1(seed_, index_, kTagSignal1, static_cast<std::uint64_t>(file));
  out.dof_used = shape;
  out.signal_gain = s1.gamma_int(shape);

  double interference = far_interference_;
  for (std::int32_t x : books.in_rc) {
    if (std::find(books.nulled.begin(), books.nulled.end(), x) != books.nulled.end()) continue;
    interference +=
        sbs_gain_[static_cast<std::size_t>(x)] * path_gain(sbs_[static_cast<std::size_t>(x)].r2, alpha1_);
  }
  if (interference <= 0) throw SimulationError("zero interference in window; enlarge window");
  out.interference = interference;
  out.sir = out.signal_gain *
            path_gain(sbs_[static_cast<std::size_t>(serving.index)].r2, alpha1_) / interference;
  return out;
}

double NetworkRealization::mbs_log_rate() const {
  Serving s;
  s.tier = Tier::MBS;
  s.index = mbs_nearest_;
  Bookkeeping none;
  return std::log1p(sample_sir(s, none, 0).sir);
}

double NetworkRealization::mbs_serving_distance() const {
  return std::sqrt(mbs_[static_cast<std::size_t>(mbs_nearest_)].r2);
}

std::optional<int> NetworkRealization::probe_background_requests() const {
  if (fidelity_ != Fidelity::Full || mode_ != Beamforming::IN) return std::nullopt;
  if (in_rc_.empty()) return std::nullopt;
  return kbg_.empty() ? std::nullopt : std::optional<int>(kbg_[0]);
}

std::optional<int> NetworkRealization::scheduled_field_count(double radius) const {
  if (fidelity_ != Fidelity::Full || mode_ != Beamforming::IN) return std::nullopt;
  if (radius > 2.0 * rc_) return std::nullopt;  // scheduling resolved within 3 rc of the origin
  int count = 0;
  for (const auto& v : sched_users_) {
    if (v.x * v.x + v.y * v.y <= radius * radius) ++count;
  }
  return count;
}

namespace {

struct CaseDef {
  int rep_file = 0;     // representative file index (0-based)
  double t = 0;         // shared caching probability
  double weight = 0;    // sum of popularities of the files in this case
  std::vector<int> files;
};

struct CaseOut {
  bool hit = false;
  bool visited = false;
  float k = 0;
  double se1 = 0;
  double dist = 0;
  double sir = 0;
};

struct RealizationOut {
  double se0 = 0;
  double sir0 = 0;
  double dist0 = 0;
  std::vector<CaseOut> cases;
};

}  // namespace

ThroughputReport estimate_throughput(const Scenario& scenario, const SimulationSpec& spec,
                                     Beamforming mode) {
  Scenario checked = validated(scenario);
  if (!checked.cache) {
    throw ValidationError({"simulation requires a cache distribution (set `t` or a scheme)"});
  }
  if (spec.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  const NetworkConfig& cfg = checked.config;

  SimulationSpec espec = spec;
  if (espec.window_radius <= 0) espec.window_radius = default_window_radius(cfg);
  const double guard = std::max(10.0 * cfg.rc_m, 5.0 / std::sqrt(cfg.lambda0));
  if (espec.window_radius < guard * (1.0 - 1e-12)) {
    throw std::invalid_argument(
        "window_radius violates the truncation guard max(10 rc, 5/sqrt(lambda0))");
  }

  const auto& t = checked.cache->t;
  const auto& pop = checked.catalog.popularity;
  const int files = checked.catalog.files;

  std::vector<CaseDef> cases;
  std::vector<int> case_of_file(static_cast<std::size_t>(files), 0);
  if (spec.per_file_conditioning) {
    std::map<double, int> index_of;
    for (int n = 0; n < files; ++n) {
      auto [it, fresh] = index_of.try_emplace(t[static_cast<std::size_t>(n)],
                                              static_cast<int>(cases.size()));
      if (fresh) {
        CaseDef def;
        def.rep_file = n;
        def.t = t[static_cast<std::size_t>(n)];
        cases.push_back(def);
      }
      cases[static_cast<std::size_t>(it->second)].weight += pop[static_cast<std::size_t>(n)];
      cases[static_cast<std::size_t>(it->second)].files.push_back(n);
      case_of_file[static_cast<std::size_t>(n)] = it->second;
    }
  } else {
    // One case per file; each realization visits the file its typical user draws.
    for (int n = 0; n < files; ++n) {
      CaseDef def;
      def.rep_file = n;
      def.t = t[static_cast<std::size_t>(n)];
      def.weight = pop[static_cast<std::size_t>(n)];
      def.files = {n};
      cases.push_back(def);
      case_of_file[static_cast<std::size_t>(n)] = n;
    }
  }

  const std::uint32_t m = spec.realizations;
  std::vector<RealizationOut> outs(m);

  std::vector<double> cdf(pop.size());
  double acc = 0;
  for (std::size_t n = 0; n < pop.size(); ++n) {
    acc += pop[n];
    cdf[n] = acc;
  }

  auto run_case = [&](const NetworkRealization& world, int file, CaseOut& co) {
    co.visited = true;
    const Serving s = world.associate(file);
    if (s.tier == Tier::SBS) {
      const Bookkeeping b = world.in_bookkeeping(s, file);
      const SirSample sir = world.sample_sir(s, b, file);
      co.hit = true;
      co.k = static_cast<float>(b.k_serving);
      co.se1 = std::log1p(sir.sir);
      co.dist = s.distance;
      co.sir = sir.sir;
    } else {
      co.hit = false;
      co.k = 0;
      co.se1 = 0;
      co.dist = world.mbs_serving_distance();
    }
  };

  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&]() {
    try {
      for (;;) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= m) break;
        NetworkRealization world(checked, espec, mode, i);
        RealizationOut& ro = outs[i];
        ro.cases.resize(cases.size());
        ro.se0 = world.mbs_log_rate();
        ro.sir0 = std::expm1(ro.se0);
        ro.dist0 = world.mbs_serving_distance();
        if (spec.per_file_conditioning) {
          for (std::size_t c = 0; c < cases.size(); ++c) {
            run_case(world, cases[c].rep_file, ro.cases[c]);
          }
        } else {
          Stream fs(spec.seed, i, kTagTypicalFile);
          const double u = fs.uniform();
          const int file =
              static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          run_case(world, file, ro.cases[static_cast<std::size_t>(case_of_file[
              static_cast<std::size_t>(file)])]);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next.store(m);
    }
  };

  int workers = spec.workers > 0 ? spec.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<std::uint32_t>(static_cast<std::uint32_t>(workers), m);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Fixed-order reduction: results cannot depend on thread scheduling.
  struct CaseAcc {
    std::uint64_t visits = 0;
    std::uint64_t hits = 0;
    double sum_se1 = 0;
    double sum_se1_sq = 0;
    double sum_contrib = 0;
    double sum_contrib_sq = 0;
  };
  std::vector<CaseAcc> case_acc(cases.size());
  double sum_r = 0, sum_r_sq = 0, sum_se0 = 0;
  const double wm = cfg.wm_hz, ws = cfg.ws_hz;

  for (std::uint32_t i = 0; i < m; ++i) {
    const RealizationOut& ro = outs[i];
    sum_se0 += ro.se0;
    double r_i = 0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const CaseOut& co = ro.cases[c];
      if (!co.visited) continue;
      CaseAcc& a = case_acc[c];
      ++a.visits;
      const double contrib = co.hit ? ws * co.se1 : wm * ro.se0;
      a.sum_contrib += contrib;
      a.sum_contrib_sq += contrib * contrib;
      if (co.hit) {
        ++a.hits;
        a.sum_se1 += co.se1;
        a.sum_se1_sq += co.se1 * co.se1;
      }
      if (spec.per_file_conditioning) {
        r_i += cases[c].weight * contrib;
      } else {
        r_i += contrib;  // the file draw already carries the popularity weight
      }
    }
    sum_r += r_i;
    sum_r_sq += r_i * r_i;
  }

  const double md = static_cast<double>(m);
  const double r_hat = sum_r / md;
  const double r_var = m > 1 ? std::max(0.0, (sum_r_sq - md * r_hat * r_hat) / (md - 1.0)) : 0.0;
  const double r0_hat = sum_se0 / md;

  ThroughputReport report;
  report.throughput = r_hat;
  report.std_error = std::sqrt(r_var / md);
  report.kbar = cfg.kbar();
  report.epsilon = mode == Beamforming::MRT ? 1.0 : analytic::residual_ratio(cfg.n1, cfg.kbar());
  report.support_size = checked.cache->support_size();
  report.provenance = spec.fidelity == Fidelity::Matched ? "sim-matched" : "sim-full";
  report.realizations = m;

  report.files.resize(static_cast<std::size_t>(files));
  for (int n = 0; n < files; ++n) {
    const CaseDef& def = cases[static_cast<std::size_t>(case_of_file[static_cast<std::size_t>(n)])];
    const CaseAcc& a = case_acc[static_cast<std::size_t>(case_of_file[static_cast<std::size_t>(n)])];
    analytic::PerFileRates& row = report.files[static_cast<std::size_t>(n)];
    const double visits = a.visits > 0 ? static_cast<double>(a.visits) : 1.0;
    const double ps_hat = static_cast<double>(a.hits) / visits;
    row.ps = ps_hat;
    row.pm = 1.0 - ps_hat;
    row.r0 = r0_hat;
    row.r1 = a.hits > 0 ? a.sum_se1 / static_cast<double>(a.hits) : 0.0;
    const double mean_contrib = a.visits > 0 ? a.sum_contrib / visits : 0.0;
    row.fs = a.visits > 0 ? ws * (a.sum_se1 / visits) : 0.0;
    row.fm = mean_contrib - row.fs;
    if (a.visits > 1) {
      const double var =
          std::max(0.0, (a.sum_contrib_sq - visits * mean_contrib * mean_contrib) / (visits - 1.0));
      row.se = std::sqrt(var / visits);
    }
    if (a.hits > 1 && row.r1 > 0) {
      const double mean1 = a.sum_se1 / static_cast<double>(a.hits);
      const double var1 = std::max(
          0.0, (a.sum_se1_sq - a.hits * mean1 * mean1) / (static_cast<double>(a.hits) - 1.0));
      const double se1 = std::sqrt(var1 / static_cast<double>(a.hits));
      if (se1 > 0.05 * row.r1 && n == def.rep_file) {
        report.warnings.push_back("file " + std::to_string(n + 1) +
                                  ": SBS rate standard error exceeds 5% of its estimate");
      }
    }
  }

  if (!spec.raw_export_path.empty()) {
    std::ofstream out(spec.raw_export_path);
    if (!out) throw IoError("cannot open raw export path: " + spec.raw_export_path);
    out << "realization_id,file,tier,serving_distance_m,k_serving,sir\n";
    for (std::uint32_t i = 0; i < m; ++i) {
      const RealizationOut& ro = outs[i];
      for (std::size_t c = 0; c < cases.size(); ++c) {
        const CaseOut& co = ro.cases[c];
        if (!co.visited) continue;
        out << i << ',' << (cases[c].rep_file + 1) << ',' << (co.hit ? 1 : 0) << ','
            << format_double(co.hit ? co.dist : ro.dist0) << ','
            << (co.hit ? static_cast<int>(co.k) : 0) << ','
            << format_double(co.hit ? co.sir : ro.sir0) << "\n";
      }
    }
  }

  return report;
}

}  // namespace hetcache::sim
