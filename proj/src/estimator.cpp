#include "soprc/estimator.hpp"

#include "soprc/core.hpp"
#include "soprc/kernels.hpp"
#include "soprc/metrics.hpp"

#include <cmath>

namespace soprc {

namespace {

void check_inputs(std::span<const double> pos, std::span<const double> neg,
                  const SurrogateParams& params) {
  if (pos.empty()) throw EmptyClassError("batch has no positive scores");
  if (neg.empty()) throw EmptyClassError("batch has no negative scores");
  for (auto s : {pos, neg})
    for (double x : s)
      if (!std::isfinite(x)) throw DomainError("non-finite batch score");
  params.validate();
}

void check_aux(std::span<const double> v) {
  if (v.empty()) throw EmptyClassError("auxiliary vector is empty");
}

double ratio_value(std::span<const double> fpr, std::span<const double> tpr, double odds,
                   double floor) {
  double acc = 0.0;
  for (std::size_t i = 0; i < fpr.size(); ++i)
    acc += detail::ratio_loss(fpr[i], tpr[i], odds, floor);
  return acc / static_cast<double>(fpr.size());
}

/// Per-positive chain-rule weights shared by both estimators.
struct Terms {
  std::vector<double> fpr, tpr;
  std::vector<double> num_weight;  // d value / d A_i
  std::vector<double> den_weight;  // d value / d B_i (0 when floored)
  double value = 0.0;
};

Terms make_terms(std::vector<double> fpr, std::vector<double> tpr, double odds, double floor) {
  Terms t;
  const std::size_t n = fpr.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  t.num_weight.resize(n);
  t.den_weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool active = tpr[i] > floor;
    const double den = active ? tpr[i] : floor;
    const double u = odds * fpr[i] / den;
    const double sp = 1.0 / ((1.0 + u) * (1.0 + u));
    t.value += u / (1.0 + u);
    t.num_weight[i] = inv_n * sp * odds / den;
    t.den_weight[i] = active ? -inv_n * sp * odds * fpr[i] / (den * den) : 0.0;
  }
  t.value *= inv_n;
  t.fpr = std::move(fpr);
  t.tpr = std::move(tpr);
  return t;
}

/// Adds the numerator (ell1) part of the gradient to d_pos and d_neg.
void add_numerator_grad(std::span<const double> pos, std::span<const double> neg,
                        const Terms& t, double tau1, EstimatorGradients& g) {
  const double inv_m = 1.0 / static_cast<double>(neg.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (t.num_weight[i] == 0.0) continue;
    double dA = 0.0;
    for (std::size_t j = 0; j < neg.size(); ++j) {
      const double d = detail::ell1_prime(pos[i] - neg[j], tau1) * inv_m;
      dA += d;
      g.d_neg[j] -= t.num_weight[i] * d;
    }
    g.d_pos[i] += t.num_weight[i] * dA;
  }
}

}  // namespace

double batch_estimator_from_tpr(std::span<const double> pos, std::span<const double> neg,
                                std::span<const double> tpr, const SurrogateParams& params) {
  check_inputs(pos, neg, params);
  if (tpr.size() != pos.size()) throw ShapeError("one TPR term per positive expected");
  const auto fpr = kernels::fpr_terms(pos, neg, params.tau1);
  return ratio_value(fpr, tpr, params.odds_factor(), params.denom_floor);
}

double batch_estimator(std::span<const double> pos, std::span<const double> neg,
                       std::span<const double> v, const SurrogateParams& params) {
  check_inputs(pos, neg, params);
  check_aux(v);
  const auto tpr = kernels::tpr_terms(pos, v, params.tau2);
  return batch_estimator_from_tpr(pos, neg, tpr, params);
}

double batch_estimator(std::span<const double> pos, std::span<const double> neg,
                       const AuxVector& v, const SurrogateParams& params) {
  return batch_estimator(pos, neg, v.values, params);
}

EstimatorGradients batch_estimator_grad(std::span<const double> pos,
                                        std::span<const double> neg,
                                        std::span<const double> v,
                                        const SurrogateParams& params, bool with_aux) {
  check_inputs(pos, neg, params);
  check_aux(v);
  const Terms t = make_terms(kernels::fpr_terms(pos, neg, params.tau1),
                             kernels::tpr_terms(pos, v, params.tau2), params.odds_factor(),
                             params.denom_floor);

  EstimatorGradients g;
  g.value = t.value;
  g.d_pos.assign(pos.size(), 0.0);
  g.d_neg.assign(neg.size(), 0.0);
  if (with_aux) g.d_aux.assign(v.size(), 0.0);
  add_numerator_grad(pos, neg, t, params.tau1, g);

  const double inv_k = 1.0 / static_cast<double>(v.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (t.den_weight[i] == 0.0) continue;
    double dB = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = detail::ell2_prime(pos[i] - v[k], params.tau2) * inv_k;
      dB += d;
      if (with_aux) g.d_aux[k] -= t.den_weight[i] * d;
    }
    g.d_pos[i] += t.den_weight[i] * dB;
  }
  return g;
}

double ap_estimator(std::span<const double> pos, std::span<const double> neg,
                    const SurrogateParams& params) {
  check_inputs(pos, neg, params);
  const auto fpr = kernels::fpr_terms(pos, neg, params.tau1);
  const auto tpr = kernels::tpr_terms(pos, pos, params.tau2);
  const double odds = static_cast<double>(neg.size()) / static_cast<double>(pos.size());
  return ratio_value(fpr, tpr, odds, params.denom_floor);
}

EstimatorGradients ap_estimator_grad(std::span<const double> pos, std::span<const double> neg,
                                     const SurrogateParams& params) {
  check_inputs(pos, neg, params);
  const double odds = static_cast<double>(neg.size()) / static_cast<double>(pos.size());
  const Terms t = make_terms(kernels::fpr_terms(pos, neg, params.tau1),
                             kernels::tpr_terms(pos, pos, params.tau2), odds,
                             params.denom_floor);

  EstimatorGradients g;
  g.value = t.value;
  g.d_pos.assign(pos.size(), 0.0);
  g.d_neg.assign(neg.size(), 0.0);
  add_numerator_grad(pos, neg, t, params.tau1, g);

  // B_i = mean_k ell2(s_i - s_k) depends on both s_i and s_k.
  const double inv_k = 1.0 / static_cast<double>(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (t.den_weight[i] == 0.0) continue;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const double d = detail::ell2_prime(pos[i] - pos[k], params.tau2) * inv_k;
      g.d_pos[i] += t.den_weight[i] * d;
      g.d_pos[k] -= t.den_weight[i] * d;
    }
  }
  return g;
}

}  // namespace soprc
