#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hetcache/model.hpp"
#include "hetcache/quadrature.hpp"

namespace hetcache::analytic {

enum class Tier { MBS = 0, SBS = 1 };

// Nulling-side quantities shared by the analytic engine and the matched
// simulator: mean request count, residual ratio, Poisson truncation index.
struct InProfile {
  double kbar = 0;
  double epsilon = 1;
  int pk_truncation = 0;
};

InProfile make_in_profile(const NetworkConfig& config);

// Interference residual ratio: probability that a nulling request of the
// typical user is not granted. Series truncated at tail mass 1e-12 and
// clamped to [0,1]. epsilon == 1 exactly when n1 == 1.
double residual_ratio(int n1, double kbar);

// P_s = 1 - exp(-pi t_n lambda1 rc^2).
double hit_probability(double t_n, double lambda1, double rc);

// Densities of the three interferer regions (inside the serving distance,
// serving distance to rc, beyond rc) induced by (t_n, epsilon).
struct ThinnedDensities {
  double inner = 0;    // lambda1 (1 - t_n) epsilon
  double annulus = 0;  // lambda1 epsilon
  double outer = 0;    // lambda1
};
ThinnedDensities thinned_densities(double t_n, const InProfile& profile, double lambda1);

enum class BetaVariant { Standard, Swapped };

// Interference kernels of the throughput expression:
//   Standard: -pi lambda_z t^(2/alpha_z) (2/alpha_z) B(1-2/alpha_z, 2/alpha_z, u)
//   Swapped:  same prefactor against B(2/alpha_z, 1-2/alpha_z, u)
// Always <= 0 for valid inputs.
double c_kernel(Tier tier, const NetworkConfig& config, double t, double u,
                BetaVariant variant = BetaVariant::Standard);

// Signal-side factor 1 - sum_k (1+t)^(-max(n1-k,1)) p_K(k); the k >= n1-1
// tail is folded exactly through the Poisson upper tail.
double signal_factor_in(int n1, double kbar, double t);
// MRT precoding keeps all n1 degrees of freedom: 1 - (1+t)^(-n1).
double signal_factor_mrt(int n1, double t);

// Spectral efficiency E[ln(1+SIR)] of the macro tier; depends only on
// (n0, alpha0) and is memoized across calls.
double mbs_spectral_efficiency(int n0, double alpha0, const QuadratureSpec& spec);

// Macro-tier throughput term: wm * exp(-kbar t_n) * mbs_spectral_efficiency.
double fm_term(double t_n, const NetworkConfig& config, const QuadratureSpec& spec);

// Frozen-grid evaluator for the small-cell term f_s and its T_n derivatives.
// The double integral is adapted once per (config, profile, mode, spec); the
// caching probability enters the integrand only through T e^(-T x H(t)), so
// repeated evaluations reduce to weighted exponential sums over the frozen
// nodes. Evaluation order is fixed, results are bit-stable per instance.
class SbsKernel {
 public:
  SbsKernel(const NetworkConfig& config, const InProfile& profile, Beamforming mode,
            const QuadratureSpec& spec);

  double fs(double t_n) const;
  double fs_prime(double t_n) const;
  double fs_second(double t_n) const;
  std::size_t nodes() const { return exponent_.size(); }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<double> exponent_;  // x * H(t) per node
  std::vector<double> weight_;    // quadrature weight * (S/t) * exp(x G) per node
  double scale_ = 0;              // ws * pi * lambda1
  double epsilon_ = 1;
};

// Process-lifetime kernel cache keyed on (config, profile, mode, spec).
// Safe for concurrent readers.
const SbsKernel& shared_sbs_kernel(const NetworkConfig& config, const InProfile& profile,
                                   Beamforming mode, const QuadratureSpec& spec);

double fs_term(double t_n, const NetworkConfig& config, const InProfile& profile,
               const QuadratureSpec& spec);
double fs_derivative(double t_n, const NetworkConfig& config, const InProfile& profile,
                     const QuadratureSpec& spec);

struct PerFileRates {
  double ps = 0;  // cache hit probability
  double pm = 0;  // macro service probability
  double r0 = 0;  // macro spectral efficiency, nats/s/Hz
  double r1 = 0;  // small-cell spectral efficiency, nats/s/Hz
  double fm = 0;  // macro throughput term, nats/s
  double fs = 0;  // small-cell throughput term, nats/s
  double se = 0;  // standard error of the per-file contribution (simulation only)
};

struct ThroughputReport {
  double throughput = 0;  // nats/s
  double std_error = 0;   // 0 for analytic results
  std::vector<PerFileRates> files;
  double epsilon = 1;
  double kbar = 0;
  int support_size = 0;
  std::string provenance;  // "analytic", "sim-matched", "sim-full"
  std::uint64_t realizations = 0;
  std::vector<std::string> warnings;
};

// Per-user throughput R(T) = sum_n a_n (f_m(T_n) + f_s(T_n)). Files sharing a
// T_n value share one term evaluation.
ThroughputReport throughput(const Scenario& scenario, Beamforming mode,
                            const QuadratureSpec& spec);

// E[ln(1+S/I)] from Laplace-transform factors:
//   int_0^inf one_minus_ls(t) * interference_factor(t) / t dt.
// `one_minus_ls` must be numerically stable near t = 0.
double mean_log1p_from_laplace(const std::function<double(double)>& one_minus_ls,
                               const std::function<double(double)>& interference_factor,
                               const QuadratureSpec& spec);

// P(SIR_0 > theta) of the macro tier via Gil-Pelaez inversion of the signal
// and interference Laplace transforms. Scale-free in lambda0.
double mbs_coverage_probability(double theta, int n0, double alpha0,
                                const QuadratureSpec& spec);

}  // namespace hetcache::analytic
