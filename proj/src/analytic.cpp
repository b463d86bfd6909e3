#include "hetcache/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "hetcache/special.hpp"

namespace hetcache::analytic {

namespace {

constexpr double kPoissonTailMass = 1e-12;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

double residual_ratio(int n1, double kbar) {
  require(n1 >= 1, "residual_ratio: n1 must be >= 1");
  require(kbar >= 0, "residual_ratio: kbar must be >= 0");
  if (n1 == 1) return 1.0;  // every summand weight is 1; the series is the whole pmf
  if (kbar == 0.0) return 0.0;

  double eps = 0.0;
  double cum_below = 0.0;
  for (int k = 0; k < n1 - 1; ++k) cum_below += special::poisson_pmf(kbar, k);
  double tail = 1.0 - cum_below;  // mass at k >= n1-1
  for (int k = n1 - 1; tail > kPoissonTailMass; ++k) {
    const double p = special::poisson_pmf(kbar, k);
    eps += (static_cast<double>(k + 1) - (n1 - 1)) / (k + 1) * p;
    tail -= p;
  }
  return std::clamp(eps, 0.0, 1.0);
}

InProfile make_in_profile(const NetworkConfig& config) {
  InProfile p;
  p.kbar = config.kbar();
  p.epsilon = residual_ratio(config.n1, p.kbar);
  p.pk_truncation = special::poisson_truncation_index(p.kbar, kPoissonTailMass);
  return p;
}

double hit_probability(double t_n, double lambda1, double rc) {
  require(t_n >= 0.0 && t_n <= 1.0, "hit_probability: t_n must lie in [0,1]");
  return -std::expm1(-kPi * t_n * lambda1 * rc * rc);
}

ThinnedDensities thinned_densities(double t_n, const InProfile& profile, double lambda1) {
  return {lambda1 * (1.0 - t_n) * profile.epsilon, lambda1 * profile.epsilon, lambda1};
}

double c_kernel(Tier tier, const NetworkConfig& config, double t, double u,
                BetaVariant variant) {
  require(t > 0.0, "c_kernel: t must be > 0");
  require(u >= 0.0 && u <= 1.0, "c_kernel: u must lie in [0,1]");
  const double lambda = tier == Tier::MBS ? config.lambda0 : config.lambda1;
  const double alpha = tier == Tier::MBS ? config.alpha0 : config.alpha1;
  const double q = 2.0 / alpha;
  const double beta = variant == BetaVariant::Standard
                          ? special::incomplete_beta(1.0 - q, q, u)
                          : special::incomplete_beta(q, 1.0 - q, u);
  return -kPi * lambda * std::pow(t, q) * q * beta;
}

namespace {

// (1 - L_{S1}(t)) evaluated without cancellation; the k >= n1-1 block shares
// the exponent 1 and folds into the Poisson upper tail exactly.
double signal_factor_in_impl(int n1, double t, const std::vector<double>& pk_head,
                             double tail_mass) {
  const double l1pt = std::log1p(t);
  double s = 0.0;
  for (int k = 0; k < n1 - 1; ++k) {
    s += pk_head[static_cast<std::size_t>(k)] * (-std::expm1(-(n1 - k) * l1pt));
  }
  s += tail_mass * (-std::expm1(-l1pt));
  return s;
}

std::vector<double> pk_head_vector(int n1, double kbar) {
  std::vector<double> head(static_cast<std::size_t>(std::max(0, n1 - 1)));
  for (int k = 0; k < n1 - 1; ++k) head[static_cast<std::size_t>(k)] = special::poisson_pmf(kbar, k);
  return head;
}

}  // namespace

double signal_factor_in(int n1, double kbar, double t) {
  require(n1 >= 1, "signal_factor_in: n1 must be >= 1");
  require(kbar >= 0, "signal_factor_in: kbar must be >= 0");
  require(t >= 0, "signal_factor_in: t must be >= 0");
  return signal_factor_in_impl(n1, t, pk_head_vector(n1, kbar),
                               special::poisson_tail(kbar, n1 - 1));
}

double signal_factor_mrt(int n1, double t) {
  require(n1 >= 1, "signal_factor_mrt: n1 must be >= 1");
  require(t >= 0, "signal_factor_mrt: t must be >= 0");
  return -std::expm1(-n1 * std::log1p(t));
}

namespace {

struct MemoKey {
  std::uint64_t words[8] = {};
  bool operator<(const MemoKey& o) const {
    return std::memcmp(words, o.words, sizeof(words)) < 0;
  }
};

std::uint64_t bits_of(double v) {
  std::uint64_t u = 0;
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

}  // namespace

namespace {

// Integrates f over (0, inf) when f decays like t^(-1-2/alpha). The body
// (0,1] runs directly; the tail maps through t = w^(-alpha/2), which turns
// the power decay into a bounded integrand on (0,1].
template <class F>
double integrate_power_tail(F&& f, double alpha, const QuadratureSpec& spec,
                            std::vector<QuadPanel>* body_leaves = nullptr,
                            std::vector<QuadPanel>* tail_leaves = nullptr) {
  QuadratureSpec half = spec;
  half.abs_tol = 0.5 * spec.abs_tol;
  const double p = 0.5 * alpha;
  const double body = integrate(f, 0.0, 1.0, half, body_leaves);
  const double tail = integrate(
      [&](double w) { return f(std::pow(w, -p)) * p * std::pow(w, -p - 1.0); }, 0.0, 1.0, half,
      tail_leaves);
  return body + tail;
}

}  // namespace

double mbs_spectral_efficiency(int n0, double alpha0, const QuadratureSpec& spec) {
  require(n0 >= 1, "mbs_spectral_efficiency: n0 must be >= 1");
  require(alpha0 > 2, "mbs_spectral_efficiency: alpha0 must be > 2");

  static std::mutex mu;
  static std::map<MemoKey, double> memo;
  MemoKey key;
  key.words[0] = static_cast<std::uint64_t>(n0);
  key.words[1] = bits_of(alpha0);
  key.words[2] = bits_of(spec.rel_tol);
  key.words[3] = bits_of(spec.abs_tol);
  key.words[4] = static_cast<std::uint64_t>(spec.max_subdivisions);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }

  const double q = 2.0 / alpha0;
  auto integrand = [&](double t) {
    const double num = -std::expm1(-n0 * std::log1p(t)) / t;
    const double beta = special::incomplete_beta(1.0 - q, q, t / (1.0 + t));
    return num / (1.0 + q * std::pow(t, q) * beta);
  };
  const double value = integrate_power_tail(integrand, alpha0, spec);

  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, value);
  return value;
}

double fm_term(double t_n, const NetworkConfig& config, const QuadratureSpec& spec) {
  require(t_n >= 0.0 && t_n <= 1.0, "fm_term: t_n must lie in [0,1]");
  return config.wm_hz * std::exp(-config.kbar() * t_n) *
         mbs_spectral_efficiency(config.n0, config.alpha0, spec);
}

SbsKernel::SbsKernel(const NetworkConfig& config, const InProfile& profile, Beamforming mode,
                     const QuadratureSpec& spec) {
  require(config.alpha1 > 2, "SbsKernel: alpha1 must be > 2");
  const double lambda1 = config.lambda1;
  const double alpha = config.alpha1;
  const double q = 2.0 / alpha;
  const double rc = config.rc_m;
  const double rc2 = rc * rc;
  const double rc_alpha = std::pow(rc, alpha);
  const int n1 = config.n1;
  const double eps = mode == Beamforming::MRT ? 1.0 : std::clamp(profile.epsilon, 0.0, 1.0);
  epsilon_ = eps;
  scale_ = config.ws_hz * kPi * lambda1;

  const std::vector<double> pk_head = pk_head_vector(n1, profile.kbar);
  const double tail_mass = special::poisson_tail(profile.kbar, n1 - 1);

  auto signal_over_t = [&](double t) {
    const double s = mode == Beamforming::MRT
                         ? signal_factor_mrt(n1, t)
                         : signal_factor_in_impl(n1, t, pk_head, tail_mass);
    return s / t;
  };

  // Derivative evaluations share this grid, so the inner axis runs one
  // decade tighter than requested.
  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = spec.rel_tol / 10.0;
  inner_spec.abs_tol = spec.abs_tol / 10.0;

  struct TSlice {
    double t = 0;
    double c1y = 0;   // C1 at t/(1+t)
    double c2u = 0;   // swapped kernel at 1/(1+t)
    double h = 0;     // pi lambda1 + eps * c2u  (> 0)
  };

  auto make_slice = [&](double t) {
    TSlice s;
    s.t = t;
    const double pref = -kPi * lambda1 * std::pow(t, q) * q;
    s.c1y = pref * special::incomplete_beta(1.0 - q, q, t / (1.0 + t));
    s.c2u = pref * special::incomplete_beta(q, 1.0 - q, 1.0 / (1.0 + t));
    s.h = kPi * lambda1 + eps * s.c2u;
    return s;
  };

  // exp(x G(t,x)) with T_n = 0; the beyond-rc kernel needs an incomplete
  // Beta per (x,t) node, everything else is per-slice.
  auto exp_xg = [&](const TSlice& s, double x) {
    double g = eps * s.c2u + eps * s.c1y;
    if (eps < 1.0) {
      const double xa = std::pow(x, 0.5 * alpha) * s.t;
      const double z = xa / (rc_alpha + xa);
      const double c1z = -kPi * lambda1 * std::pow(s.t, q) * q *
                         special::incomplete_beta(1.0 - q, q, z);
      g += (1.0 - eps) * c1z;
    }
    return std::exp(x * g);
  };

  auto inner_value = [&](const TSlice& s) {
    return integrate([&](double x) { return exp_xg(s, x); }, 0.0, rc2, inner_spec);
  };

  // Pass 1: adapt the outer t axis with the integrand at T_n = 0 (the least
  // damped case). Body and power-mapped tail are adapted separately.
  auto outer_f = [&](double t) {
    const TSlice s = make_slice(t);
    return signal_over_t(t) * inner_value(s);
  };
  std::vector<QuadPanel> body_leaves, tail_leaves;
  try {
    integrate_power_tail(outer_f, alpha, spec, &body_leaves, &tail_leaves);
  } catch (const QuadratureError& e) {
    throw QuadratureError(std::string("fs outer (t) axis: ") + e.what(), e.estimate(),
                          e.error_bound());
  }

  // Pass 2: freeze every leaf's Kronrod nodes on both axes. `t` and the
  // outer weight already absorb the tail substitution.
  auto push_slice = [&](double t, double wt) {
    const TSlice s = make_slice(t);
    const double factor = wt * signal_over_t(t);

    std::vector<QuadPanel> inner_leaves;
    try {
      integrate([&](double x) { return exp_xg(s, x); }, 0.0, rc2, inner_spec, &inner_leaves);
    } catch (const QuadratureError& e) {
      throw QuadratureError(std::string("fs inner (x) axis: ") + e.what(), e.estimate(),
                            e.error_bound());
    }
    for (const auto& leaf : inner_leaves) {
      const double half = 0.5 * (leaf.b - leaf.a);
      const double center = 0.5 * (leaf.a + leaf.b);
      for (int j = 0; j < 8; ++j) {
        for (int sign = j == 7 ? 1 : -1; sign <= 1; sign += 2) {
          const double x = center + sign * half * quad::kXgk[j];
          exponent_.push_back(x * s.h);
          weight_.push_back(factor * quad::kWgk[j] * half * exp_xg(s, x));
        }
      }
    }
  };

  const double p = 0.5 * alpha;
  for (const auto& leaf : body_leaves) {
    const double half = 0.5 * (leaf.b - leaf.a);
    const double center = 0.5 * (leaf.a + leaf.b);
    for (int j = 0; j < 8; ++j) {
      for (int sign = j == 7 ? 1 : -1; sign <= 1; sign += 2) {
        push_slice(center + sign * half * quad::kXgk[j], quad::kWgk[j] * half);
      }
    }
  }
  for (const auto& leaf : tail_leaves) {
    const double half = 0.5 * (leaf.b - leaf.a);
    const double center = 0.5 * (leaf.a + leaf.b);
    for (int j = 0; j < 8; ++j) {
      for (int sign = j == 7 ? 1 : -1; sign <= 1; sign += 2) {
        const double w = center + sign * half * quad::kXgk[j];
        push_slice(std::pow(w, -p), quad::kWgk[j] * half * p * std::pow(w, -p - 1.0));
      }
    }
  }
}

double SbsKernel::fs(double t_n) const {
  require(t_n >= 0.0 && t_n <= 1.0, "fs: t_n must lie in [0,1]");
  double acc = 0.0;
  for (std::size_t i = 0; i < exponent_.size(); ++i) {
    acc += weight_[i] * std::exp(-t_n * exponent_[i]);
  }
  return scale_ * t_n * acc;
}

double SbsKernel::fs_prime(double t_n) const {
  require(t_n >= 0.0 && t_n <= 1.0, "fs_prime: t_n must lie in [0,1]");
  double acc = 0.0;
  for (std::size_t i = 0; i < exponent_.size(); ++i) {
    acc += weight_[i] * std::exp(-t_n * exponent_[i]) * (1.0 - t_n * exponent_[i]);
  }
  return scale_ * acc;
}

double SbsKernel::fs_second(double t_n) const {
  require(t_n >= 0.0 && t_n <= 1.0, "fs_second: t_n must lie in [0,1]");
  double acc = 0.0;
  for (std::size_t i = 0; i < exponent_.size(); ++i) {
    acc += weight_[i] * std::exp(-t_n * exponent_[i]) * exponent_[i] * (t_n * exponent_[i] - 2.0);
  }
  return scale_ * acc;
}

const SbsKernel& shared_sbs_kernel(const NetworkConfig& config, const InProfile& profile,
                                   Beamforming mode, const QuadratureSpec& spec) {
  static std::mutex mu;
  static std::map<MemoKey, std::unique_ptr<SbsKernel>> cache;

  MemoKey key;
  key.words[0] = bits_of(config.lambda1);
  key.words[1] = bits_of(config.alpha1);
  key.words[2] = bits_of(config.rc_m);
  key.words[3] = bits_of(config.ws_hz);
  key.words[4] = (static_cast<std::uint64_t>(config.n1) << 1) |
                 (mode == Beamforming::MRT ? 1u : 0u);
  key.words[5] = bits_of(mode == Beamforming::MRT ? 1.0 : profile.epsilon);
  key.words[6] = bits_of(profile.kbar);
  key.words[7] = bits_of(spec.rel_tol) ^ (bits_of(spec.abs_tol) << 1) ^
                 static_cast<std::uint64_t>(spec.max_subdivisions);

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<SbsKernel>(config, profile, mode, spec)).first;
  }
  return *it->second;
}

double fs_term(double t_n, const NetworkConfig& config, const InProfile& profile,
               const QuadratureSpec& spec) {
  return shared_sbs_kernel(config, profile, Beamforming::IN, spec).fs(t_n);
}

double fs_derivative(double t_n, const NetworkConfig& config, const InProfile& profile,
                     const QuadratureSpec& spec) {
  return shared_sbs_kernel(config, profile, Beamforming::IN, spec).fs_prime(t_n);
}

ThroughputReport throughput(const Scenario& scenario, Beamforming mode,
                            const QuadratureSpec& spec) {
  Scenario checked = validated(scenario);
  if (!checked.cache) {
    throw ValidationError({"throughput requires a cache distribution (set `t` or a scheme)"});
  }
  const NetworkConfig& config = checked.config;
  const ContentCatalog& catalog = checked.catalog;
  const CacheDistribution& cache = *checked.cache;

  const InProfile profile = make_in_profile(config);
  const SbsKernel& kernel = shared_sbs_kernel(config, profile, mode, spec);
  const double r0 = mbs_spectral_efficiency(config.n0, config.alpha0, spec);
  const double kbar = config.kbar();

  std::map<double, std::pair<double, double>> terms;  // t_n -> (fm, fs)
  ThroughputReport report;
  report.files.resize(cache.t.size());
  double total = 0.0;
  for (std::size_t i = 0; i < cache.t.size(); ++i) {
    const double tn = cache.t[i];
    auto it = terms.find(tn);
    if (it == terms.end()) {
      double fm = 0, fs = 0;
      try {
        fm = config.wm_hz * std::exp(-kbar * tn) * r0;
        fs = kernel.fs(tn);
      } catch (const QuadratureError& e) {
        throw QuadratureError("throughput term failed at file " + std::to_string(i + 1) + ": " +
                                  e.what(),
                              e.estimate(), e.error_bound());
      }
      it = terms.emplace(tn, std::make_pair(fm, fs)).first;
    }
    PerFileRates& row = report.files[i];
    row.ps = hit_probability(tn, config.lambda1, config.rc_m);
    row.pm = 1.0 - row.ps;
    row.r0 = r0;
    row.fm = it->second.first;
    row.fs = it->second.second;
    row.r1 = row.ps > 0.0 ? row.fs / (config.ws_hz * row.ps) : 0.0;
    total += catalog.popularity[i] * (row.fm + row.fs);
  }

  report.throughput = total;
  report.epsilon = kernel.epsilon();
  report.kbar = kbar;
  report.support_size = cache.support_size();
  report.provenance = "analytic";
  return report;
}

double mean_log1p_from_laplace(const std::function<double(double)>& one_minus_ls,
                               const std::function<double(double)>& interference_factor,
                               const QuadratureSpec& spec) {
  return integrate_half_line(
      [&](double t) { return one_minus_ls(t) * interference_factor(t) / t; }, spec);
}

double mbs_coverage_probability(double theta, int n0, double alpha0,
                                const QuadratureSpec& spec) {
  require(theta > 0, "mbs_coverage_probability: theta must be > 0");
  require(n0 >= 1 && alpha0 > 2, "mbs_coverage_probability: bad n0/alpha0");
  const double q = 2.0 / alpha0;

  // phi(w) = E[e^{iw(S - theta I)}] after integrating the service distance:
  //   (1-iw)^{-n0} / (1 + q s^q B(1-q, q, s/(1+s))),  s = i theta w.
  auto phi = [&](double w) -> std::complex<double> {
    const std::complex<double> iw(0.0, w);
    const std::complex<double> s(0.0, theta * w);
    const std::complex<double> z = s / (1.0 + s);
    const std::complex<double> beta = special::incomplete_beta_path(1.0 - q, q, z);
    const std::complex<double> denom = 1.0 + q * std::pow(s, q) * beta;
    return std::pow(1.0 - iw, -static_cast<double>(n0)) / denom;
  };

  const double integral = integrate_half_line(
      [&](double w) { return phi(w).imag() / w; }, spec);
  return std::clamp(0.5 + integral / kPi, 0.0, 1.0);
}

}  // namespace hetcache::analytic
