#include "soprc/surrogate.hpp"

#include "soprc/core.hpp"

#include <cmath>

namespace soprc {

void SurrogateParams::validate() const {
  if (!(tau1 > 0.0) || !std::isfinite(tau1)) throw SpecError("tau1 must be positive");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw SpecError("tau2 must be positive");
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior_pi must lie in (0, 1)");
  if (!(denom_floor > 0.0)) throw SpecError("denom_floor must be positive");
}

namespace detail {

double ell2(double x, double tau2) noexcept {
  if (x >= 0.0) return 0.0;
  return std::tanh(-x / (2.0 * tau2));
}

double ell2_prime(double x, double tau2) noexcept {
  if (x >= 0.0) return 0.0;
  const double t = std::tanh(x / (2.0 * tau2));
  return -(1.0 - t * t) / (2.0 * tau2);
}

}  // namespace detail

namespace {

void check(double x, double tau) {
  if (!std::isfinite(x)) throw DomainError("surrogate loss argument is not finite");
  if (!(tau > 0.0)) throw DomainError("surrogate temperature must be positive");
}

}  // namespace

double ell1(double x, double tau1) {
  check(x, tau1);
  return detail::ell1(x, tau1);
}

double ell1_prime(double x, double tau1) {
  check(x, tau1);
  return detail::ell1_prime(x, tau1);
}

double ell2(double x, double tau2) {
  check(x, tau2);
  return detail::ell2(x, tau2);
}

double ell2_prime(double x, double tau2) {
  check(x, tau2);
  return detail::ell2_prime(x, tau2);
}

double sigma(double u) {
  if (!(u >= 0.0)) throw DomainError("sigma requires a non-negative argument");
  return u / (1.0 + u);
}

double sigma_prime(double u) {
  if (!(u >= 0.0)) throw DomainError("sigma requires a non-negative argument");
  const double d = 1.0 + u;
  return 1.0 / (d * d);
}

}  // namespace soprc
