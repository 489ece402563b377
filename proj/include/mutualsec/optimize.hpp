#pragma once

// One-dimensional search helpers used by the design optimizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace mutualsec::optimize {

struct Minimum {
  double x = 0.0;
  double fx = std::numeric_limits<double>::infinity();
};

// Golden-section search on [a, b]; stops once the bracket is narrower than
// rel_tol * |x| (or rel_tol when x is ~0).
template <class F>
Minimum golden_section(F&& f, double a, double b, double rel_tol = 1e-9, int max_iter = 500) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= rel_tol * std::max(std::abs(mid), std::numeric_limits<double>::min())) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = hi;
    return g;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t k = 0; k < points; ++k)
    g[k] = std::exp(llo + (lhi - llo) * static_cast<double>(k) / static_cast<double>(points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// Coarse scan over a log-spaced grid on [lo, hi] (lo > 0) to bracket the
// global minimum, then golden-section refinement inside the bracket. The
// endpoints themselves are candidates, so boundary minima are returned exactly.
template <class F>
Minimum bracketed_minimum(F&& f, double lo, double hi, std::size_t points = 1024, double rel_tol = 1e-9) {
  if (!(hi > lo)) return Minimum{hi, f(hi)};
  const auto grid = log_grid(lo, hi, points);
  std::size_t best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = f(grid[k]);
    if (v < best_f) {
      best_f = v;
      best = k;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  Minimum refined = golden_section(f, a, b, rel_tol);
  if (best_f < refined.fx) return Minimum{grid[best], best_f};
  return refined;
}

// Bisection for the boundary of a predicate that holds at `inside` and fails
// at `outside`. Returns the last point known to satisfy it.
template <class P>
double bisect_boundary(P&& holds, double inside, double outside, int iterations = 64) {
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (holds(mid)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace mutualsec::optimize
