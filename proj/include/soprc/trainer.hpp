#pragma once

#include "soprc/core.hpp"
#include "soprc/estimator.hpp"
#include "soprc/model.hpp"
#include "soprc/rng.hpp"
#include "soprc/surrogate.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace soprc {

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

struct LrSchedule {
  enum class Kind { constant, inverse, pl };
  Kind kind = Kind::constant;
  double value = 0.1;  ///< eta, C_eta or mu depending on kind

  static LrSchedule constant(double eta) { return {Kind::constant, eta}; }
  static LrSchedule inverse(double c_eta) { return {Kind::inverse, c_eta}; }
  static LrSchedule pl(double mu) { return {Kind::pl, mu}; }
};

const char* to_string(LrSchedule::Kind kind) noexcept;
LrSchedule::Kind lr_kind_from_string(const std::string& name);

/// constant: eta; inverse: C/t; pl: (2t+1) / (mu (t+1)^2). Requires t >= 1.
double lr_at(const LrSchedule& schedule, std::size_t t);

struct TrainConfig {
  std::size_t n_pos = 8;
  std::size_t n_neg = 32;
  double beta = 0.001;
  LrSchedule lr;
  double weight_decay = 4e-4;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::size_t max_iters = 2000;
  std::uint64_t seed = 0;
  /// prior_pi is replaced by the training set prior unless prior_override is set.
  SurrogateParams surrogate;
  std::optional<double> prior_override;
  /// Validation AUPRC every eval_every iterations and at the last one;
  /// 0 keeps only the last.
  std::size_t eval_every = 100;
  /// Backpropagate through the fresh-batch share of v_{t+1} instead of
  /// treating v as a constant.
  bool aux_gradient = false;

  /// Throws SpecError.
  void validate() const;
};

struct TrainRecord {
  std::size_t iter;
  double loss;
  double reg;
  double grad_norm;
  double lr;
  std::optional<double> val_auprc;
};

struct TrainTrace {
  std::vector<TrainRecord> records;
  std::vector<std::string> warnings;

  /// Header iter,loss,reg,grad_norm,lr,val_auprc; val_auprc blank when absent.
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  ScorerModel model;
  AuxVector aux;
  TrainTrace trace;
};

/// v <- (1 - beta_t) v + beta_t m, step_count + 1.
AuxVector ema_update(const AuxVector& v, std::span<const double> interpolated, double beta_t);

struct SemiVariance {
  double value = 0.0;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

/// One-sided variance penalty: low positives (below the batch mean) and high
/// negatives (above it). Gradients include the dependence of the means.
SemiVariance semi_variance(std::span<const double> pos, std::span<const double> neg,
                           double lambda1, double lambda2);

/// v_{t+1} = (1 - beta) v_prev + beta phi(pos scores), differentiated through.
struct AuxEcho {
  std::span<const double> v_prev;
  double beta;
};

struct Objective {
  double loss = 0.0;  ///< batch estimator value
  double reg = 0.0;   ///< semi-variance value
  std::vector<double> grad;  ///< d(loss + reg)/dw, weight decay excluded
};

/// Loss and parameter gradient for one batch against a fixed v. When `echo`
/// is given, v is rebuilt from it and the batch scores, and the gradient
/// flows through the rebuild.
Objective evaluate_objective(const ScorerModel& model, const Dataset& data, const Batch& batch,
                             std::span<const double> v, const TrainConfig& cfg,
                             const SurrogateParams& params, const AuxEcho* echo = nullptr);

/// SGD on the smoothed AUPRC objective with a moving-average auxiliary vector.
/// Deterministic given cfg.seed. Throws DivergenceError on a non-finite loss or
/// gradient.
TrainResult train(const Dataset& data, ScorerModel model, const TrainConfig& cfg,
                  const Dataset* validation = nullptr);

/// Effective surrogate params for a dataset: prior from the data unless overridden.
SurrogateParams effective_params(const TrainConfig& cfg, const Dataset& data);

/// Scores every row of a feature matrix.
std::vector<double> score_rows(const ScorerModel& model, const FeatureMatrix& rows);
ScoreSet score_dataset(const ScorerModel& model, const Dataset& data);

}  // namespace soprc
