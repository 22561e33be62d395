#include "soprc/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace soprc {

namespace {

void check_prior(double prior_pi) {
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior must lie in (0, 1)");
}

std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

/// #{x in sorted : x >= c}
std::size_t count_at_least(const std::vector<double>& sorted, double c) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::lower_bound(sorted.begin(), sorted.end(), c));
}

double precision_at(double tpr, double fpr, double pi) {
  const double tp = pi * tpr;
  return tp / (tp + (1.0 - pi) * fpr);
}

double mean_ratio_loss(const ScoreSet& scores, double odds, double tau1, double tau2,
                       double floor, Exec exec) {
  const auto fpr = kernels::fpr_terms(scores.pos, scores.neg, tau1, exec);
  const auto tpr = kernels::tpr_terms(scores.pos, scores.pos, tau2, exec);
  double acc = 0.0;
  for (std::size_t i = 0; i < fpr.size(); ++i)
    acc += detail::ratio_loss(fpr[i], tpr[i], odds, floor);
  return acc / static_cast<double>(fpr.size());
}

}  // namespace

double empirical_auprc(const ScoreSet& scores, double prior_pi) {
  scores.validate();
  check_prior(prior_pi);
  const auto pos = sorted_copy(scores.pos);
  const auto neg = sorted_copy(scores.neg);
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  double acc = 0.0;
  for (double c : scores.pos) {
    const double tpr = static_cast<double>(count_at_least(pos, c)) / np;
    const double fpr = static_cast<double>(count_at_least(neg, c)) / nn;
    acc += precision_at(tpr, fpr, prior_pi);
  }
  return acc / np;
}

double surrogate_risk(const ScoreSet& scores, const SurrogateParams& params, Exec exec) {
  scores.validate();
  params.validate();
  return mean_ratio_loss(scores, params.odds_factor(), params.tau1, params.tau2,
                         params.denom_floor, exec);
}

double ap_loss(const ScoreSet& scores, const SurrogateParams& params, Exec exec) {
  scores.validate();
  params.validate();
  // sum/sum == (N-/N+) * mean/mean; flooring the mean keeps the 0/0 case
  // consistent with the batch estimator.
  const double odds =
      static_cast<double>(scores.neg.size()) / static_cast<double>(scores.pos.size());
  return mean_ratio_loss(scores, odds, params.tau1, params.tau2, params.denom_floor, exec);
}

PRCurve pr_curve(const ScoreSet& scores, double prior_pi) {
  scores.validate();
  check_prior(prior_pi);
  const auto pos = sorted_copy(scores.pos);
  const auto neg = sorted_copy(scores.neg);
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  PRCurve curve;
  curve.points.reserve(pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
    const double tpr = static_cast<double>(count_at_least(pos, *it)) / np;
    const double fpr = static_cast<double>(count_at_least(neg, *it)) / nn;
    curve.points.push_back({tpr, precision_at(tpr, fpr, prior_pi)});
  }
  return curve;
}

double PRCurve::step_area() const noexcept {
  double area = 0.0;
  double prev = 0.0;
  for (const auto& p : points) {
    area += (p.recall - prev) * p.precision;
    prev = p.recall;
  }
  return area;
}

void PRCurve::write_csv(std::ostream& out) const {
  out << "recall,precision\n" << std::setprecision(17);
  for (const auto& p : points) out << p.recall << ',' << p.precision << '\n';
}

}  // namespace soprc
