#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hetcache/analytic.hpp"
#include "hetcache/model.hpp"

namespace hetcache::opt {

enum class Method { GradientProjection, KktNearOpt };
enum class InitKind { Uniform, Mpc, Custom };

struct OptimizerSpec {
  Method method = Method::KktNearOpt;
  int max_iters = 500;
  double obj_rel_tol = 1e-7;
  double bisection_tol = 1e-10;  // relative width of the nu bracket
  InitKind init = InitKind::Uniform;
  std::vector<double> init_vector;
};

// argmin ||x - v||^2 subject to sum(x) = c and 0 <= x_i <= 1, via bisection
// on the shift multiplier with a final exact correction on the free set.
std::vector<double> project_capped_simplex(std::vector<double> v, double c);

struct OptimizeResult {
  CacheDistribution cache;
  double objective = 0;  // R(T), nats/s
  double nu_star = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = true;
  bool heuristic = false;  // near-opt outside the proven concave regime
  std::vector<int> clamped_low;
  std::vector<int> clamped_high;
  std::vector<double> trace;  // objective per accepted iterate (P0)
  std::vector<std::string> warnings;
};

// Local-optimal cache placement by projected gradient ascent with Armijo
// backtracking on R(T).
OptimizeResult solve_p0(const Scenario& scenario, const OptimizerSpec& spec, Beamforming mode,
                        const QuadratureSpec& quad);

// Near-optimal placement from the KKT stationarity of the SBS-only
// objective: per-file bisection of a_n fs'(t) = nu nested in a bisection on
// nu driving sum(T) to C.
OptimizeResult solve_p1_near_opt(const Scenario& scenario, const OptimizerSpec& spec,
                                 Beamforming mode, const QuadratureSpec& quad);

OptimizeResult optimize(const Scenario& scenario, const OptimizerSpec& spec, Beamforming mode,
                        const QuadratureSpec& quad);

struct ConvexityReport {
  std::vector<double> grid;
  std::vector<double> fs_second;  // central differences of fs' at the grid
  bool all_nonpositive = true;
  double fm_second_at_zero = 0;  // (pi lambda1 rc^2)^2 fm(0), always > 0
  bool inside_convex_regime = false;
};

ConvexityReport convexity_probe(const Scenario& scenario, const std::vector<double>& grid,
                                const QuadratureSpec& quad);

}  // namespace hetcache::opt
