#include "soprc/kernels.hpp"

#include "soprc/core.hpp"
#include "soprc/surrogate.hpp"

#include <omp.h>

namespace soprc {

void set_num_threads(int n) {
  if (n < 1) throw SpecError("thread count must be >= 1");
  omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

namespace kernels {

double mean_ell1_against(double c, std::span<const double> neg, double tau1) noexcept {
  double acc = 0.0;
  for (double s : neg) acc += detail::ell1(c - s, tau1);
  return acc / static_cast<double>(neg.size());
}

double mean_ell2_against(double c, std::span<const double> ref, double tau2) noexcept {
  double acc = 0.0;
  for (double s : ref) acc += detail::ell2(c - s, tau2);
  return acc / static_cast<double>(ref.size());
}

namespace {

template <typename Fn>
std::vector<double> map_positives(std::span<const double> pos, Exec exec, Fn&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(pos.size());
  std::vector<double> out(pos.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(pos[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(pos[i]);
  }
  return out;
}

}  // namespace

std::vector<double> fpr_terms(std::span<const double> pos, std::span<const double> neg,
                              double tau1, Exec exec) {
  return map_positives(pos, exec, [&](double c) { return mean_ell1_against(c, neg, tau1); });
}

std::vector<double> tpr_terms(std::span<const double> pos, std::span<const double> ref,
                              double tau2, Exec exec) {
  return map_positives(pos, exec, [&](double c) { return mean_ell2_against(c, ref, tau2); });
}

double ordered_sum(std::span<const double> xs) noexcept {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc;
}

}  // namespace kernels
}  // namespace soprc
