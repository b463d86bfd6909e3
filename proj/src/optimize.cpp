#include "hetcache/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace hetcache::opt {

namespace {

using analytic::SbsKernel;

constexpr double kArmijoSigma = 1e-4;
constexpr double kBacktrack = 0.5;

double sum_clamped(const std::vector<double>& v, double mu) {
  double s = 0;
  for (double x : v) s += std::clamp(x - mu, 0.0, 1.0);
  return s;
}

}  // namespace

std::vector<double> project_capped_simplex(std::vector<double> v, double c) {
  const std::size_t n = v.size();
  if (n == 0 || !(c > 0.0) || c > static_cast<double>(n)) {
    throw std::invalid_argument("project_capped_simplex: need 0 < c <= length(v)");
  }

  double lo = *std::min_element(v.begin(), v.end()) - 1.0;  // sum = n >= c
  double hi = *std::max_element(v.begin(), v.end());        // sum = 0 <= c
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sum_clamped(v, mid) >= c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);

  // The clamp pattern is now settled; shift the free coordinates exactly.
  int free_count = 0;
  for (double x : v) {
    const double y = x - mu;
    if (y > 0.0 && y < 1.0) ++free_count;
  }
  if (free_count > 0) mu += (sum_clamped(v, mu) - c) / free_count;

  for (double& x : v) x = std::clamp(x - mu, 0.0, 1.0);
  return v;
}

namespace {

// Shared setup for both solvers: term evaluators over the frozen kernel.
struct Problem {
  Scenario scenario;
  const SbsKernel* kernel = nullptr;
  double fm0 = 0;    // wm * r0
  double kbar = 0;   // fm(t) = fm0 * exp(-kbar t)
  double budget = 0; // C

  double fm(double t) const { return fm0 * std::exp(-kbar * t); }
  double fm_prime(double t) const { return -kbar * fm(t); }

  double objective(const std::vector<double>& x) const {
    std::map<double, double> memo;
    const auto& a = scenario.catalog.popularity;
    double r = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto it = memo.find(x[i]);
      if (it == memo.end()) it = memo.emplace(x[i], fm(x[i]) + kernel->fs(x[i])).first;
      r += a[i] * it->second;
    }
    return r;
  }

  void gradient(const std::vector<double>& x, std::vector<double>& g) const {
    std::map<double, double> memo;
    const auto& a = scenario.catalog.popularity;
    g.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto it = memo.find(x[i]);
      if (it == memo.end()) {
        it = memo.emplace(x[i], fm_prime(x[i]) + kernel->fs_prime(x[i])).first;
      }
      g[i] = a[i] * it->second;
    }
  }
};

Problem make_problem(const Scenario& scenario, Beamforming mode, const QuadratureSpec& quad) {
  Problem p;
  p.scenario = validated(scenario);
  const NetworkConfig& cfg = p.scenario.config;
  const analytic::InProfile profile = analytic::make_in_profile(cfg);
  p.kernel = &analytic::shared_sbs_kernel(cfg, profile, mode, quad);
  p.fm0 = cfg.wm_hz * analytic::mbs_spectral_efficiency(cfg.n0, cfg.alpha0, quad);
  p.kbar = cfg.kbar();
  p.budget = static_cast<double>(p.scenario.cache_capacity);
  return p;
}

std::vector<double> initial_point(const Problem& p, const OptimizerSpec& spec) {
  const int f = p.scenario.catalog.files;
  const double c = p.budget;
  switch (spec.init) {
    case InitKind::Uniform:
      return std::vector<double>(static_cast<std::size_t>(f), c / f);
    case InitKind::Mpc: {
      std::vector<double> x(static_cast<std::size_t>(f), 0.0);
      for (int n = 0; n < static_cast<int>(c) && n < f; ++n) x[static_cast<std::size_t>(n)] = 1.0;
      return project_capped_simplex(std::move(x), c);
    }
    case InitKind::Custom: {
      if (static_cast<int>(spec.init_vector.size()) != f) {
        throw std::invalid_argument("custom init vector length must equal the catalog size");
      }
      for (double v : spec.init_vector) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument("custom init vector must lie in [0,1]");
        }
      }
      double s = 0;
      for (double v : spec.init_vector) s += v;
      if (std::abs(s - c) > 1e-6 * std::max(1.0, c)) {
        throw std::invalid_argument("custom init vector must satisfy sum(t) = C");
      }
      return spec.init_vector;
    }
  }
  return {};
}

void fill_active_sets(const std::vector<double>& x, OptimizeResult& out) {
  out.clamped_low.clear();
  out.clamped_high.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) out.clamped_low.push_back(static_cast<int>(i));
    if (x[i] >= 1.0) out.clamped_high.push_back(static_cast<int>(i));
  }
}

}  // namespace

OptimizeResult solve_p0(const Scenario& scenario, const OptimizerSpec& spec, Beamforming mode,
                        const QuadratureSpec& quad) {
  if (spec.max_iters < 1 || spec.obj_rel_tol <= 0) {
    throw std::invalid_argument("solve_p0: bad optimizer spec");
  }
  Problem p = make_problem(scenario, mode, quad);
  std::vector<double> x = initial_point(p, spec);

  OptimizeResult out;
  double fx = p.objective(x);
  out.trace.push_back(fx);
  std::vector<double> g, y;

  int iter = 0;
  bool stationary = false;
  for (; iter < spec.max_iters; ++iter) {
    p.gradient(x, g);

    double step = 1.0;
    bool accepted = false;
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> cand(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] + step * g[i];
      y = project_capped_simplex(std::move(cand), p.budget);

      double gd = 0, move = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        gd += g[i] * (y[i] - x[i]);
        move += std::abs(y[i] - x[i]);
      }
      if (move == 0.0) {
        stationary = true;
        break;
      }
      const double fy = p.objective(y);
      if (fy >= fx + kArmijoSigma * gd) {
        const double rel = std::abs(fy - fx) / std::max(std::abs(fx), 1e-300);
        x = y;
        fx = fy;
        out.trace.push_back(fx);
        accepted = true;
        if (rel < spec.obj_rel_tol) stationary = true;
        break;
      }
      step *= kBacktrack;
    }
    if (stationary) {
      ++iter;
      break;
    }
    if (!accepted) {
      out.warnings.push_back("line search stalled; returning the best iterate");
      break;
    }
  }

  out.converged = stationary;
  if (!stationary && iter >= spec.max_iters) {
    out.warnings.push_back("gradient projection hit max_iters before the objective settled");
  }
  out.iterations = iter;
  out.objective = fx;
  out.cache = CacheDistribution{x, p.scenario.cache_capacity};
  fill_active_sets(x, out);
  return out;
}

namespace {

// fs' evaluations keyed by the bit pattern of t. Bisections below always run
// on [0,1], so their probe points are dyadic and shared across files and
// outer iterations.
class DerivativeCache {
 public:
  explicit DerivativeCache(const SbsKernel& kernel) : kernel_(kernel) {}

  double operator()(double t) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &t, sizeof(bits));
    auto it = memo_.find(bits);
    if (it == memo_.end()) it = memo_.emplace(bits, kernel_.fs_prime(t)).first;
    return it->second;
  }

 private:
  const SbsKernel& kernel_;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace

OptimizeResult solve_p1_near_opt(const Scenario& scenario, const OptimizerSpec& spec,
                                 Beamforming mode, const QuadratureSpec& quad) {
  if (spec.bisection_tol <= 0) throw std::invalid_argument("solve_p1_near_opt: bad bisection_tol");
  Problem p = make_problem(scenario, mode, quad);
  const NetworkConfig& cfg = p.scenario.config;
  const auto& a = p.scenario.catalog.popularity;
  const int f = p.scenario.catalog.files;
  const double budget = p.budget;

  OptimizeResult out;
  const bool concave = cfg.inside_convex_regime();
  out.heuristic = !concave;
  if (!concave) {
    out.warnings.push_back(
        "outside the proven concave regime (rc <= sqrt(2/(pi lambda1)) and n1 > 4); "
        "near-opt roots are located by scan-then-bisect and marked heuristic");
  }

  DerivativeCache fs_prime(*p.kernel);

  // Bounds of fs' over [0,1] set the nu bracket.
  double g_min, g_max;
  if (concave) {
    g_max = fs_prime(0.0);
    g_min = fs_prime(1.0);
  } else {
    g_min = g_max = fs_prime(0.0);
    for (int k = 1; k <= 64; ++k) {
      const double v = fs_prime(static_cast<double>(k) / 64.0);
      g_min = std::min(g_min, v);
      g_max = std::max(g_max, v);
    }
  }

  // Root of a_n fs'(t) = nu in [0,1], clamped at the box.
  auto xi = [&](double nu, double an) -> double {
    const double target = nu / an;
    if (concave) {
      if (target >= fs_prime(0.0)) return 0.0;
      if (target <= fs_prime(1.0)) return 1.0;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fs_prime(mid) >= target ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    // Heuristic branch: take the first downward crossing from t = 0.
    double prev = fs_prime(0.0) - target;
    if (prev <= 0.0) return 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double tk = static_cast<double>(k) / 64.0;
      const double cur = fs_prime(tk) - target;
      if (cur <= 0.0) {
        double lo = static_cast<double>(k - 1) / 64.0, hi = tk;
        for (int it = 0; it < 54 && hi - lo > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          (fs_prime(mid) - target >= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      prev = cur;
    }
    return 1.0;  // never dropped below the target
  };

  // Files sharing a popularity value share xi by construction.
  auto sum_t = [&](double nu, std::vector<double>* t_out) {
    double s = 0;
    double last_a = -1, last_xi = 0;
    if (t_out) t_out->assign(static_cast<std::size_t>(f), 0.0);
    for (int n = 0; n < f; ++n) {
      const double an = a[static_cast<std::size_t>(n)];
      if (an != last_a) {
        last_xi = an > 0 ? xi(nu, an) : 0.0;
        last_a = an;
      }
      s += last_xi;
      if (t_out) (*t_out)[static_cast<std::size_t>(n)] = last_xi;
    }
    return s;
  };

  double nu_lo = a[static_cast<std::size_t>(f - 1)] * g_min;  // sum = F >= C
  double nu_hi = a[0] * g_max;                                // sum = 0 <= C
  if (nu_lo > nu_hi) std::swap(nu_lo, nu_hi);
  {
    const double s_lo = sum_t(nu_lo, nullptr);
    const double s_hi = sum_t(nu_hi, nullptr);
    if (s_lo + 1e-9 < budget || s_hi - 1e-9 > budget) {
      throw BracketError(
          "near-opt bisection bracket cannot reach sum(T) = C; fall back to solve_p0");
    }
  }

  const double residual_tol = 1e-9 * budget;
  double nu = 0.5 * (nu_lo + nu_hi);
  double residual = 0;
  int iter = 0;
  bool converged = false;
  for (; iter < 300; ++iter) {
    nu = 0.5 * (nu_lo + nu_hi);
    const double s = sum_t(nu, nullptr);
    residual = s - budget;
    if (std::abs(residual) <= residual_tol) {
      converged = true;
      break;
    }
    if (residual > 0) {
      nu_lo = nu;
    } else {
      nu_hi = nu;
    }
    if (nu_hi - nu_lo <= spec.bisection_tol * std::max({std::abs(nu_lo), std::abs(nu_hi), 1e-300})) {
      nu = 0.5 * (nu_lo + nu_hi);
      const double s2 = sum_t(nu, nullptr);
      residual = s2 - budget;
      converged = std::abs(residual) <= residual_tol;
      break;
    }
  }

  std::vector<double> t_star;
  sum_t(nu, &t_star);
  if (!converged) {
    out.warnings.push_back("near-opt budget residual " + std::to_string(residual) +
                           " exceeded 1e-9*C after bisection; result kept");
  }

  // Spread the leftover bisection residual over the free coordinates, so the
  // budget holds to machine precision rather than to the bisection budget.
  {
    double s = 0;
    int free_count = 0;
    for (double t : t_star) {
      s += t;
      free_count += t > 1e-7 && t < 1.0 - 1e-7;
    }
    if (free_count > 0) {
      const double shift = (s - budget) / free_count;
      if (std::abs(shift) < 1e-6) {
        for (double& t : t_star) {
          if (t > 1e-7 && t < 1.0 - 1e-7) t = std::clamp(t - shift, 0.0, 1.0);
        }
      }
    }
  }

  out.converged = converged;
  out.iterations = iter + 1;
  out.nu_star = nu;
  out.objective = p.objective(t_star);
  out.cache = CacheDistribution{t_star, p.scenario.cache_capacity};
  fill_active_sets(t_star, out);
  return out;
}

OptimizeResult optimize(const Scenario& scenario, const OptimizerSpec& spec, Beamforming mode,
                        const QuadratureSpec& quad) {
  return spec.method == Method::GradientProjection ? solve_p0(scenario, spec, mode, quad)
                                                   : solve_p1_near_opt(scenario, spec, mode, quad);
}

ConvexityReport convexity_probe(const Scenario& scenario, const std::vector<double>& grid,
                                const QuadratureSpec& quad) {
  Problem p = make_problem(scenario, Beamforming::IN, quad);

  ConvexityReport report;
  report.inside_convex_regime = p.scenario.config.inside_convex_regime();
  report.fm_second_at_zero = p.kbar * p.kbar * p.fm(0.0);

  const double h = 1e-4;
  for (double t : grid) {
    const double tc = std::clamp(t, h, 1.0 - h);
    const double second = (p.kernel->fs_prime(tc + h) - p.kernel->fs_prime(tc - h)) / (2.0 * h);
    report.grid.push_back(t);
    report.fs_second.push_back(second);
    if (second > 0) report.all_nonpositive = false;
  }
  return report;
}

}  // namespace hetcache::opt
