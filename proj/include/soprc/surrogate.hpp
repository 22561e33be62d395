#pragma once

namespace soprc {

/// Hyperparameters of the smoothed AUPRC objective.
struct SurrogateParams {
  double tau1 = 1.0;   ///< width of the one-side Huber loss (score units)
  double tau2 = 0.1;   ///< temperature of the one-side sigmoid loss
  double prior_pi = 0.1;
  double denom_floor = 1e-8;

  /// Throws SpecError unless tau1, tau2, denom_floor > 0 and 0 < prior_pi < 1.
  void validate() const;
  /// (1 - pi) / pi
  double odds_factor() const noexcept { return (1.0 - prior_pi) / prior_pi; }
};

// One-side Huber loss, an upper surrogate of the 0-1 step on x <= 0 outside
// (-tau1/2, 0). Convex, non-increasing, C^1.
double ell1(double x, double tau1);
double ell1_prime(double x, double tau1);

// One-side sigmoid loss, tanh(-x / (2 tau2)) for x < 0 and 0 otherwise.
// Bounded in [0, 1) and below the 0-1 step. The derivative at the kink x = 0
// is the right derivative, 0.
double ell2(double x, double tau2);
double ell2_prime(double x, double tau2);

// sigma(u) = u / (1 + u) on u >= 0.
double sigma(double u);
double sigma_prime(double u);

// Unchecked forms for inner loops whose inputs were validated upstream.
namespace detail {

inline double ell1(double x, double tau1) noexcept {
  if (x >= tau1) return 0.0;
  if (x < 0.0) return -2.0 * x / tau1;
  const double r = 1.0 - x / tau1;
  return r * r;
}

inline double ell1_prime(double x, double tau1) noexcept {
  if (x >= tau1) return 0.0;
  if (x < 0.0) return -2.0 / tau1;
  return -2.0 * (1.0 - x / tau1) / tau1;
}

double ell2(double x, double tau2) noexcept;
double ell2_prime(double x, double tau2) noexcept;

}  // namespace detail

}  // namespace soprc
