#pragma once

#include "soprc/surrogate.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace soprc {

/// Moving-average stand-in for the full vector of positive scores.
struct AuxVector {
  std::vector<double> values;  ///< length N+, non-increasing
  double beta = 0.001;
  std::size_t step_count = 0;
};

struct EstimatorGradients {
  double value = 0.0;
  std::vector<double> d_pos;  ///< d value / d pos_scores
  std::vector<double> d_neg;  ///< d value / d neg_scores, always >= 0
  std::vector<double> d_aux;  ///< d value / d v; empty unless requested
};

// Sampling-rate-invariant batch estimator:
//   (1/n+) sum_i sigma((1-pi)/pi * A_i / max(B_i, floor))
//   A_i = mean_j ell1(s+_i - s-_j),  B_i = mean_k ell2(s+_i - v_k).
// pi is params.prior_pi (the dataset prior, not the batch rate).

double batch_estimator(std::span<const double> pos, std::span<const double> neg,
                       std::span<const double> v, const SurrogateParams& params);
double batch_estimator(std::span<const double> pos, std::span<const double> neg,
                       const AuxVector& v, const SurrogateParams& params);

/// Same value with B_i supplied by the caller, for loops that reuse them.
double batch_estimator_from_tpr(std::span<const double> pos, std::span<const double> neg,
                                std::span<const double> tpr, const SurrogateParams& params);

/// Gradient w.r.t. all batch scores, treating v as a constant. With
/// `with_aux`, d_aux also holds the gradient w.r.t. v.
EstimatorGradients batch_estimator_grad(std::span<const double> pos,
                                        std::span<const double> neg,
                                        std::span<const double> v,
                                        const SurrogateParams& params, bool with_aux = false);

// Conventional AP batch estimator: the TPR term comes from the batch's own
// positives (self term included) and the odds factor is the batch's n-/n+.
// params.prior_pi is ignored.

double ap_estimator(std::span<const double> pos, std::span<const double> neg,
                    const SurrogateParams& params);
EstimatorGradients ap_estimator_grad(std::span<const double> pos, std::span<const double> neg,
                                     const SurrogateParams& params);

}  // namespace soprc
