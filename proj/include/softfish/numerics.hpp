#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>

#include "softfish/errors.hpp"

namespace softfish::numerics {

// Gauss-Legendre rule on [-1, 1]. Only the non-negative half of the nodes is
// stored; integrate() sums f(x) + f(-x) in pairs so that even/odd integrands
// come out exactly even/odd in floating point.
template <std::size_t N>
class GaussLegendre {
  static_assert(N % 2 == 0, "use an even node count");

public:
  static constexpr std::size_t kHalf = N / 2;

  GaussLegendre() {
    for (std::size_t i = 0; i < kHalf; ++i) {
      // Tricomi initial guess, then Newton on P_N.
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double kd = static_cast<double>(k);
          const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          break;
        }
      }
      nodes_[i] = x;
      weights_[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  // Integral of f over [-half_width, half_width].
  template <class F>
  double integrate_symmetric(F&& f, double half_width) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < kHalf; ++i) {
      const double y = half_width * nodes_[i];
      sum += weights_[i] * (f(y) + f(-y));
    }
    return sum * half_width;
  }

  const std::array<double, kHalf>& nodes() const noexcept { return nodes_; }
  const std::array<double, kHalf>& weights() const noexcept { return weights_; }

private:
  std::array<double, kHalf> nodes_{};
  std::array<double, kHalf> weights_{};
};

struct RootResult {
  double x;
  double residual;
  int iterations;
};

// Newton iteration safeguarded by bisection on a sign-change bracket.
// f_df(x) returns {f(x), f'(x)}. Converged when |f| <= ftol.
template <class F>
RootResult safeguarded_newton(F&& f_df, double lo, double hi, double x0,
                              double ftol, int max_iter = 100) {
  auto [flo, dlo] = f_df(lo);
  auto [fhi, dhi] = f_df(hi);
  (void)dlo;
  (void)dhi;
  if (std::abs(flo) <= ftol) {
    return {lo, flo, 0};
  }
  if (std::abs(fhi) <= ftol) {
    return {hi, fhi, 0};
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NonConvergence("root not bracketed", lo, hi);
  }
  // Orient so that f(xl) < 0 < f(xh).
  double xl = flo < 0.0 ? lo : hi;
  double xh = flo < 0.0 ? hi : lo;

  double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [f, df] = f_df(x);

  for (int it = 1; it <= max_iter; ++it) {
    if (std::abs(f) <= ftol) {
      return {x, f, it - 1};
    }
    const bool newton_leaves_bracket =
        ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
    const bool newton_too_slow = std::abs(2.0 * f) > std::abs(dx_old * df);
    dx_old = dx;
    if (newton_leaves_bracket || newton_too_slow || df == 0.0) {
      dx = 0.5 * (xh - xl);
      x = 0.5 * (xl + xh);
    } else {
      dx = f / df;
      x -= dx;
    }
    std::tie(f, df) = f_df(x);
    if (f < 0.0) {
      xl = x;
    } else {
      xh = x;
    }
    if (xl == xh || std::nextafter(xl, xh) == xh) {
      if (std::abs(f) <= ftol) {
        return {x, f, it};
      }
      throw NonConvergence("bracket collapsed before residual tolerance was met",
                           std::min(lo, hi), std::max(lo, hi));
    }
  }
  throw NonConvergence("iteration limit reached", std::min(lo, hi), std::max(lo, hi));
}

} // namespace softfish::numerics
