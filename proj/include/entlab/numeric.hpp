#pragma once

// Small numerical kernels shared by the geometry and flow modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "entlab/core.hpp"

namespace entlab::numeric {

namespace detail {

template <typename F>
double gk_adapt(F& f, double a, double b, double rel_tol, double abs_tol, unsigned depth) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * std::abs(b - a);  // reported on the reference interval
  if (depth == 0 || err <= std::max(abs_tol, rel_tol * l1)) return v;
  const double m = 0.5 * (a + b);
  return gk_adapt(f, a, m, rel_tol, 0.5 * abs_tol, depth - 1) + gk_adapt(f, m, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (31-point) integral of f over [a, b]. Bisection
/// stops once the error estimate is below max(abs_tol, rel_tol * L1).
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0, unsigned max_depth = 18) {
  if (a == b) return 0.0;
  return detail::gk_adapt(f, a, b, rel_tol, abs_tol, max_depth);
}

/// Integral over [a, b] split at the given interior breakpoints.
template <typename F>
double integrate_split(F&& f, double a, double b, std::vector<double> breaks, double rel_tol = 1e-13,
                       double abs_tol = 0.0) {
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo || x >= b) continue;
    total += integrate(f, lo, x, rel_tol, abs_tol);
    lo = x;
  }
  return total + integrate(f, lo, b, rel_tol, abs_tol);
}

/// Bisection on a sign-changing bracket, polished with Newton steps when df is given.
template <typename F, typename DF>
double bisect_newton(F&& f, DF&& df, double lo, double hi, double tol = 1e-15) {
  double flo = f(lo);
  double fhi = f(hi);
  require(flo * fhi <= 0.0, "root bracket does not change sign");
  for (int it = 0; it < 200 && hi - lo > 1e-6 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double step = f(x) / df(x);
    x -= step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

/// Plain bisection; returns the midpoint of the final bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-15, int max_iter = 300) {
  double flo = f(lo);
  require(flo * f(hi) <= 0.0, "root bracket does not change sign");
  for (int it = 0; it < max_iter && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// One classical Runge-Kutta step for y' = rhs(t, y).
template <std::size_t N, typename Rhs>
std::array<double, N> rk4_step(Rhs&& rhs, double t, const std::array<double, N>& y, double h) {
  auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const auto k1 = rhs(t, y);
  const auto k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const auto k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const auto k4 = rhs(t + h, axpy(y, h, k3));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  return out;
}

/// Number of equal steps of size <= dt covering a span.
inline long step_count(double span, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
}

}  // namespace entlab::numeric
