#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops shared by the metrics, the estimators and the
// simulation lab. Every kernel has a serial reference path and an OpenMP path
// that produce bit-identical results: each output element is computed by one
// thread with a fixed summation order, and any reduction across elements is
// done afterwards in index order.

namespace soprc {

enum class Exec { serial, parallel };

/// Sets the OpenMP team size used by Exec::parallel kernels (n >= 1).
void set_num_threads(int n);
int num_threads();

namespace kernels {

/// mean_j ell1(c - neg[j])
double mean_ell1_against(double c, std::span<const double> neg, double tau1) noexcept;
/// mean_k ell2(c - ref[k])
double mean_ell2_against(double c, std::span<const double> ref, double tau2) noexcept;

/// out[i] = mean_ell1_against(pos[i], neg, tau1)
std::vector<double> fpr_terms(std::span<const double> pos, std::span<const double> neg,
                              double tau1, Exec exec = Exec::parallel);
/// out[i] = mean_ell2_against(pos[i], ref, tau2)
std::vector<double> tpr_terms(std::span<const double> pos, std::span<const double> ref,
                              double tau2, Exec exec = Exec::parallel);

/// Sum in index order.
double ordered_sum(std::span<const double> xs) noexcept;

}  // namespace kernels
}  // namespace soprc
