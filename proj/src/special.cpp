#include "hetcache/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetcache::special {

double incomplete_beta(double x, double y, double z, const QuadratureSpec& spec) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw std::invalid_argument("incomplete_beta: requires x > 0 and y > 0");
  }
  if (std::isnan(z) || z < -1e-12 || z > 1.0 + 1e-12) {
    throw std::invalid_argument("incomplete_beta: z must lie in [0,1]");
  }
  z = std::clamp(z, 0.0, 1.0);
  if (z == 0.0) return 0.0;

  const double split = std::min(z, 0.5);

  // [0, split]: v = u^x, integrand (1 - v^(1/x))^(y-1) / x, smooth on the range.
  const double inv_x = 1.0 / x;
  double value = integrate(
      [=](double v) { return std::pow(1.0 - std::pow(v, inv_x), y - 1.0) * inv_x; },
      0.0, std::pow(split, x), spec);

  if (z > split) {
    // [split, z]: w = (1-u)^y, integrand (1 - w^(1/y))^(x-1) / y.
    const double inv_y = 1.0 / y;
    const double lo = std::pow(1.0 - z, y);
    const double hi = std::pow(1.0 - split, y);
    value += integrate(
        [=](double w) { return std::pow(1.0 - std::pow(w, inv_y), x - 1.0) * inv_y; },
        lo, hi, spec);
  }
  return value;
}

std::complex<double> incomplete_beta_path(double a, double b, std::complex<double> z,
                                          const QuadratureSpec& spec) {
  if (!(a > 0.0)) throw std::invalid_argument("incomplete_beta_path: requires a > 0");
  if (z == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};

  // u = z v^(1/a) turns the path integral into (z^a / a) int_0^1 (1 - z v^(1/a))^(b-1) dv.
  const double inv_a = 1.0 / a;
  auto f = [=](double v) -> std::complex<double> {
    return std::pow(std::complex<double>(1.0, 0.0) - z * std::pow(v, inv_a), b - 1.0);
  };
  return std::pow(z, a) * inv_a * integrate_complex(f, 0.0, 1.0, spec);
}

double poisson_pmf(double kbar, int k) {
  if (kbar < 0.0 || k < 0) {
    throw std::invalid_argument("poisson_pmf: requires kbar >= 0 and k >= 0");
  }
  if (kbar == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(kbar) - kbar - std::lgamma(k + 1.0));
}

double poisson_tail(double kbar, int k) {
  if (k <= 0) return 1.0;
  // Forward-sum the head in extended precision; the head is the small piece
  // only when k is far above kbar, where the tail recursion below takes over.
  if (k <= kbar + 10.0 * std::sqrt(kbar) + 10.0) {
    long double head = 0.0L;
    long double term = std::exp(-static_cast<long double>(kbar));
    for (int j = 0; j < k; ++j) {
      head += term;
      term *= kbar / static_cast<long double>(j + 1);
    }
    return static_cast<double>(std::max(0.0L, 1.0L - head));
  }
  long double term = poisson_pmf(kbar, k);
  long double sum = 0.0L;
  for (int j = k; term > 0.0L; ++j) {
    sum += term;
    term *= kbar / static_cast<long double>(j + 1);
    if (term < sum * 1e-20L && j > kbar) break;
  }
  return static_cast<double>(sum);
}

int poisson_truncation_index(double kbar, double tail_mass) {
  if (kbar < 0.0 || tail_mass <= 0.0) {
    throw std::invalid_argument("poisson_truncation_index: bad arguments");
  }
  int k = static_cast<int>(kbar);
  while (poisson_tail(kbar, k + 1) > tail_mass) ++k;
  return k;
}

}  // namespace hetcache::special
