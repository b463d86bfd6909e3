#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hetcache/errors.hpp"

namespace hetcache {

// Tolerances for the adaptive integrators. The improper integrals behind the
// throughput expression have no closed form, so every consumer states how hard
// it wants the quadrature to try.
struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_subdivisions = 2000;

  bool valid() const noexcept {
    return rel_tol > 0 && abs_tol > 0 && max_subdivisions >= 1;
  }
};

struct QuadPanel {
  double a = 0;
  double b = 0;
};

struct QuadResult {
  double magnitude = 0;  // |integral|; signed value comes back through value_out
  double error_bound = 0;
  int panels = 0;
};

namespace quad {

// Gauss-Kronrod 7/15 abscissas and weights (positive half, QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline double abs_of(const T& v) {
  return std::abs(v);
}

template <class T>
struct PanelEval {
  double a = 0, b = 0;
  T value{};
  double error = 0;
};

// One Gauss-Kronrod 7/15 rule application on [a,b]. Error estimate follows
// the QUADPACK rescaling so integrable endpoint singularities are not
// under-reported.
template <class T, class F>
PanelEval<T> gk15(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double center = 0.5 * (a + b);

  T fc = f(center);
  T resk = kWgk[7] * fc;
  T resg = kWg[3] * fc;
  double resabs = kWgk[7] * abs_of(fc);

  T fv[14];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[7 + j] = f(center + dx);
    const T sum = fv[j] + fv[7 + j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (abs_of(fv[j]) + abs_of(fv[7 + j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }

  const T mean = resk * 0.5;
  double resasc = kWgk[7] * abs_of(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (abs_of(fv[j] - mean) + abs_of(fv[7 + j] - mean));
  }

  PanelEval<T> out;
  out.a = a;
  out.b = b;
  out.value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = abs_of((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50) {
    err = std::max(err, eps50 * resabs);
  }
  out.error = err;
  return out;
}

// Globally adaptive bisection. Evaluates the integrand only at interior
// nodes, so integrable endpoint singularities are acceptable. When `leaves`
// is given, the final panel list is recorded (used to freeze quadrature
// grids for repeated evaluation).
template <class T, class F>
QuadResult integrate_adaptive_t(F&& f, double a, double b, const QuadratureSpec& spec,
                                std::vector<QuadPanel>* leaves, T* value_out) {
  if (!spec.valid()) throw std::invalid_argument("invalid QuadratureSpec");
  if (!(b > a)) {
    if (value_out) *value_out = T{};
    if (leaves) leaves->clear();
    return {0.0, 0.0, 0};
  }

  std::vector<PanelEval<T>> panels;
  panels.reserve(64);
  panels.push_back(gk15<T>(f, a, b));

  auto total = [&panels]() {
    T v{};
    double e = 0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair<T, double>(v, e);
  };

  while (static_cast<int>(panels.size()) < spec.max_subdivisions) {
    auto [val, err] = total();
    const double target = std::max(spec.abs_tol, spec.rel_tol * abs_of(val));
    if (err <= target) break;

    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const double pa = panels[worst].a;
    const double pb = panels[worst].b;
    const double pm = 0.5 * (pa + pb);
    if (!(pm > pa && pm < pb)) break;  // interval exhausted at double precision

    panels[worst] = gk15<T>(f, pa, pm);
    panels.push_back(gk15<T>(f, pm, pb));
  }

  auto [val, err] = total();
  const double target = std::max(spec.abs_tol, spec.rel_tol * abs_of(val));
  if (err > target) {
    throw QuadratureError(
        "adaptive quadrature did not converge: error bound " + std::to_string(err) +
            " exceeds tolerance " + std::to_string(target) + " after " +
            std::to_string(panels.size()) + " panels",
        abs_of(val), err);
  }

  if (leaves) {
    leaves->clear();
    leaves->reserve(panels.size());
    for (const auto& p : panels) leaves->push_back({p.a, p.b});
    std::sort(leaves->begin(), leaves->end(),
              [](const QuadPanel& x, const QuadPanel& y) { return x.a < y.a; });
  }
  if (value_out) *value_out = val;
  return {abs_of(val), err, static_cast<int>(panels.size())};
}

}  // namespace quad

template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                 std::vector<QuadPanel>* leaves = nullptr) {
  double value = 0;
  quad::integrate_adaptive_t<double>(std::forward<F>(f), a, b, spec, leaves, &value);
  return value;
}

template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b, const QuadratureSpec& spec) {
  std::complex<double> value{};
  quad::integrate_adaptive_t<std::complex<double>>(std::forward<F>(f), a, b, spec, nullptr,
                                                   &value);
  return value;
}

// Integrates f over (0, inf) through the substitution t = u/(1-u).
template <class F>
double integrate_half_line(F&& f, const QuadratureSpec& spec,
                           std::vector<QuadPanel>* leaves = nullptr) {
  auto g = [&f](double u) {
    const double omu = 1.0 - u;
    const double t = u / omu;
    return f(t) / (omu * omu);
  };
  return integrate(g, 0.0, 1.0, spec, leaves);
}

}  // namespace hetcache
