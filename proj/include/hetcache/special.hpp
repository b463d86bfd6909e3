#pragma once

#include <complex>

#include "hetcache/quadrature.hpp"

namespace hetcache::special {

// Default spec for the special-function integrals. Tighter than the
// throughput quadrature because kernel values feed into exponents.
inline QuadratureSpec beta_quadrature() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-13;
  spec.max_subdivisions = 400;
  return spec;
}

// Incomplete Beta function B(x,y,z) = int_0^z u^(x-1) (1-u)^(y-1) du for
// x > 0, y > 0, z in [0,1]. The endpoint singularities at u=0 and u=1 are
// removed by the power substitutions v = u^x and w = (1-u)^y before the
// adaptive rule runs.
double incomplete_beta(double x, double y, double z,
                       const QuadratureSpec& spec = beta_quadrature());

// B(a,b,z) continued along the straight path from 0 to complex z with
// Re(1 - z s) > 0 on the path. Used by the Gil-Pelaez coverage evaluation.
std::complex<double> incomplete_beta_path(double a, double b, std::complex<double> z,
                                          const QuadratureSpec& spec = beta_quadrature());

// Poisson pmf (kbar^k / k!) e^(-kbar), evaluated in log space.
double poisson_pmf(double kbar, int k);

// Upper tail P(K >= k) for K ~ Poisson(kbar).
double poisson_tail(double kbar, int k);

// Smallest k* with P(K <= k*) >= 1 - tail_mass.
int poisson_truncation_index(double kbar, double tail_mass);

}  // namespace hetcache::special
