#pragma once

#include "soprc/core.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace soprc {

struct InterpConfig {
  std::size_t target_len = 1;  ///< N+
  ScoreRange range;            ///< [b, B]

  void validate() const;
};

/// Piecewise-linear resampling of n scores onto N+ quantile positions.
///
/// The scores are sorted descending into knots u_1 >= ... >= u_n placed at
/// positions i/n, with an extrapolated top knot u_0 = clamp(2u_1 - u_2, b, B)
/// at position 0. Output entry j (1-based) is the interpolant evaluated at
/// j/N+, so m is non-increasing, m_{N+} = u_n, and n == N+ is a pass-through.
/// For n == 1 the output is constant.
///
/// Throws EmptyClassError for n == 0, ShapeError for n > N+, RangeError for a
/// score outside [b, B].
std::vector<double> interpolate(std::span<const double> u, const InterpConfig& cfg);

/// Vector-Jacobian product of interpolate at u: returns d<g, m(u)>/du in the
/// caller's (unsorted) order. Clamped boundary knots contribute no gradient.
std::vector<double> interpolate_vjp(std::span<const double> u, const InterpConfig& cfg,
                                    std::span<const double> g);

/// Extrapolated end knots. u_{n+1} lies past the last target position, so it
/// only bounds the output range.
struct BoundaryKnots {
  double top;     ///< u_0
  double bottom;  ///< u_{n+1}
};
BoundaryKnots boundary_knots(std::span<const double> sorted_desc, const ScoreRange& range);

/// Sup-norm gap between an increasing quantile function p on [0, 1] and its
/// piecewise-linear interpolant through the knots p(i/n), i = 0..n, measured
/// on the grid k/grid_len, k = 0..grid_len. Throws MonotonicityError when the
/// knot values are not non-decreasing.
double interp_sup_error(const std::function<double(double)>& quantile_fn, std::size_t n,
                        std::size_t grid_len);

}  // namespace soprc
