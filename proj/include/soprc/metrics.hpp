#pragma once

#include "soprc/core.hpp"
#include "soprc/kernels.hpp"
#include "soprc/surrogate.hpp"

#include <iosfwd>
#include <vector>

namespace soprc {

struct PRPoint {
  double recall;
  double precision;
};

/// One point per positive example, ordered by decreasing threshold.
struct PRCurve {
  std::vector<PRPoint> points;

  /// sum_k (r_k - r_{k-1}) p_k with r_0 = 0.
  double step_area() const noexcept;
  /// Header `recall,precision`, one row per point.
  void write_csv(std::ostream& out) const;
};

/// Mean over positives of pi TPR / (pi TPR + (1 - pi) FPR) at each positive's
/// score. A score equal to the threshold counts as retrieved.
double empirical_auprc(const ScoreSet& scores, double prior_pi);

/// Full-set smoothed risk: mean over positives of
/// sigma((1-pi)/pi * FPR(c; ell1) / max(TPR(c; ell2), floor)),
/// TPR averaged over every positive including the threshold itself.
double surrogate_risk(const ScoreSet& scores, const SurrogateParams& params,
                      Exec exec = Exec::parallel);

/// AP loss: same terms with the odds factor replaced by the set's own N-/N+.
double ap_loss(const ScoreSet& scores, const SurrogateParams& params,
               Exec exec = Exec::parallel);

PRCurve pr_curve(const ScoreSet& scores, double prior_pi);

namespace detail {

/// sigma(odds * fpr / max(tpr, floor))
inline double ratio_loss(double fpr, double tpr, double odds, double floor) noexcept {
  const double u = odds * fpr / (tpr > floor ? tpr : floor);
  return u / (1.0 + u);
}

}  // namespace detail
}  // namespace soprc
