#include "soprc/interp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace soprc {

void InterpConfig::validate() const {
  if (target_len < 1) throw SpecError("interpolation target length must be >= 1");
  range.validate();
}

BoundaryKnots boundary_knots(std::span<const double> s, const ScoreRange& range) {
  if (s.empty()) throw EmptyClassError("no scores to interpolate");
  if (s.size() == 1) return {s[0], s[0]};
  const std::size_t n = s.size();
  return {std::clamp(2.0 * s[0] - s[1], range.lo, range.hi),
          std::clamp(2.0 * s[n - 1] - s[n - 2], range.lo, range.hi)};
}

namespace {

struct Knots {
  std::vector<std::size_t> order;  // order[i] = caller index of the i-th largest score
  std::vector<double> values;      // values[0] = u_0, values[i] = u_i
  bool top_clamped = false;
};

Knots make_knots(std::span<const double> u, const InterpConfig& cfg) {
  cfg.validate();
  if (u.empty()) throw EmptyClassError("no scores to interpolate");
  if (u.size() > cfg.target_len)
    throw ShapeError("cannot interpolate " + std::to_string(u.size()) + " scores onto " +
                     std::to_string(cfg.target_len) + " positions");
  for (double x : u) {
    if (!std::isfinite(x)) throw DomainError("non-finite score");
    if (!cfg.range.contains(x)) throw RangeError("score outside interpolation range");
  }

  Knots k;
  k.order.resize(u.size());
  std::iota(k.order.begin(), k.order.end(), std::size_t{0});
  std::stable_sort(k.order.begin(), k.order.end(),
                   [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

  k.values.resize(u.size() + 1);
  for (std::size_t i = 0; i < u.size(); ++i) k.values[i + 1] = u[k.order[i]];
  const auto sorted = std::span<const double>(k.values).subspan(1);
  k.values[0] = boundary_knots(sorted, cfg.range).top;
  if (u.size() >= 2) {
    const double raw = 2.0 * sorted[0] - sorted[1];
    k.top_clamped = raw != k.values[0];
  }
  return k;
}

}  // namespace

std::vector<double> interpolate(std::span<const double> u, const InterpConfig& cfg) {
  const Knots k = make_knots(u, cfg);
  const std::size_t n = u.size();
  const std::size_t big_n = cfg.target_len;
  const auto& kv = k.values;

  std::vector<double> m(big_n);
  for (std::size_t j = 1; j <= big_n; ++j) {
    // target position j/N+ in knot coordinates: j*n/N+ = lo + rem/N+
    const std::size_t lo = (j * n) / big_n;
    const std::size_t rem = (j * n) % big_n;
    if (rem == 0) {
      m[j - 1] = kv[lo];
    } else {
      const double f = static_cast<double>(rem) / static_cast<double>(big_n);
      const double y = kv[lo] + f * (kv[lo + 1] - kv[lo]);
      m[j - 1] = std::clamp(y, kv[lo + 1], kv[lo]);
    }
  }
  return m;
}

std::vector<double> interpolate_vjp(std::span<const double> u, const InterpConfig& cfg,
                                    std::span<const double> g) {
  if (g.size() != cfg.target_len) throw ShapeError("cotangent length must equal target_len");
  const Knots k = make_knots(u, cfg);
  const std::size_t n = u.size();
  const std::size_t big_n = cfg.target_len;

  std::vector<double> gk(n + 1, 0.0);
  for (std::size_t j = 1; j <= big_n; ++j) {
    const std::size_t lo = (j * n) / big_n;
    const std::size_t rem = (j * n) % big_n;
    const double f = static_cast<double>(rem) / static_cast<double>(big_n);
    gk[lo] += (1.0 - f) * g[j - 1];
    if (rem != 0) gk[lo + 1] += f * g[j - 1];
  }
  // u_0 = 2 u_1 - u_2 (or u_1 when n == 1)
  if (n == 1) {
    gk[1] += gk[0];
  } else if (!k.top_clamped) {
    gk[1] += 2.0 * gk[0];
    gk[2] -= gk[0];
  }

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[k.order[i]] = gk[i + 1];
  return out;
}

double interp_sup_error(const std::function<double(double)>& quantile_fn, std::size_t n,
                        std::size_t grid_len) {
  if (n < 1 || grid_len < 1) throw SpecError("n and grid_len must be >= 1");
  std::vector<double> knots(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    knots[i] = quantile_fn(static_cast<double>(i) / static_cast<double>(n));
    if (!std::isfinite(knots[i])) throw DomainError("quantile function is not finite");
    if (i > 0 && knots[i] < knots[i - 1])
      throw MonotonicityError("quantile samples are not non-decreasing");
  }

  double worst = 0.0;
  for (std::size_t k = 0; k <= grid_len; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(grid_len);
    const std::size_t i = std::min(static_cast<std::size_t>(x * static_cast<double>(n)), n - 1);
    const double t = x * static_cast<double>(n) - static_cast<double>(i);
    const double approx = knots[i] + t * (knots[i + 1] - knots[i]);
    worst = std::max(worst, std::abs(quantile_fn(x) - approx));
  }
  return worst;
}

}  // namespace soprc
