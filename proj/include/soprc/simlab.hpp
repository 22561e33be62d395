#pragma once

#include "soprc/distributions.hpp"
#include "soprc/result_table.hpp"
#include "soprc/surrogate.hpp"
#include "soprc/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace soprc {

// Seeded Monte-Carlo experiments. Repeat r always draws from stream r, so
// every result is identical for any OpenMP thread count.

// ---------------------------------------------------------------------------
// Estimator bias
// ---------------------------------------------------------------------------

struct BiasExperimentSpec {
  ScoreDistribution distribution;
  std::size_t population_size = 100000;
  double prior_pi = 0.1;
  double sample_rate_pi0 = 0.2;
  /// n = n+ + n-, with n+ = round(pi0 * n)
  std::vector<std::size_t> batch_sizes{64, 128, 256, 512, 1024};
  std::size_t repeats = 500;
  std::uint64_t seed = 1;
  SurrogateParams surrogate{1.0, 0.1, 0.1, 1e-8};
  /// Co-evolve v with the moving average instead of fixing it at the
  /// population interpolant.
  bool coupled = false;
  std::size_t coupled_steps = 50;
  double coupled_beta = 0.1;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Population drawn once per (distribution, size, prior, seed) with the
/// quantities shared by every batch size and sampling rate.
struct BiasPopulation {
  ScoreSet scores;
  std::vector<double> v;    ///< interpolant of all positives (sorted descending)
  std::vector<double> tpr;  ///< tpr[i] = mean_k ell2(scores.pos[i] - v[k])
  SurrogateParams params;   ///< prior set to the population prior
  double reference = 0.0;   ///< surrogate_risk over the population
};

BiasPopulation make_bias_population(const BiasExperimentSpec& spec);

/// Series "proposed" and "ap": mean and std over repeats of
/// (estimator - reference), x = batch size.
ResultTable run_bias_experiment(const BiasPopulation& population, const BiasExperimentSpec& spec);
ResultTable run_bias_experiment(const BiasExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Interpolation error
// ---------------------------------------------------------------------------

struct InterpExperimentSpec {
  ScoreDistribution distribution;
  std::vector<std::size_t> n_values{8, 16, 32, 64, 128};
  std::size_t target_len = 1000;
  std::size_t repeats = 500;
  std::uint64_t seed = 1;
  /// Quantile window for the noise-free series.
  double quantile_lo = 0.05;
  double quantile_hi = 0.95;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Series "sampled": sup-norm gap between the sorted population positives and
/// the interpolant of n of them. Series "analytic": interp_sup_error of the
/// positive quantile function restricted to [quantile_lo, quantile_hi].
ResultTable run_interp_experiment(const InterpExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Moving-average concentration
// ---------------------------------------------------------------------------

struct EmaExperimentSpec {
  ScoreDistribution distribution;
  std::size_t num_pos = 200;    ///< N+, fixed scores of a fixed scorer
  std::size_t batch_pos = 16;   ///< n+ per step
  std::vector<double> betas{0.5, 0.1, 0.01};
  std::size_t steps = 600;      ///< T
  std::size_t repeats = 1000;
  std::uint64_t seed = 1;
  ScoreRange range{-10.0, 10.0};
  double v_init = -10.0;        ///< every entry of v_1
  /// The decay fit uses steps whose bias exceeds this many standard errors.
  double fit_snr = 10.0;

  void validate() const;
  nlohmann::json to_json() const;
};

struct EmaBetaResult {
  double beta;
  std::vector<double> bias;      ///< |E[mean(v_t)] - mean(E[phi])|, t = 1..T+1
  std::vector<double> bias_se;   ///< Monte-Carlo standard error of bias[t]
  std::vector<double> var_ratio; ///< per entry Var[v_{T+1}] / Var[phi]
  double decay_slope;            ///< least-squares slope of log bias over the fit window
  std::size_t fit_points;
  double bound() const noexcept { return beta / (2.0 - beta); }
};

struct EmaExperimentResult {
  std::vector<EmaBetaResult> per_beta;
  ResultTable to_table() const;
};

EmaExperimentResult run_ema_experiment(const EmaExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Leave-one-out stability
// ---------------------------------------------------------------------------

struct StabilitySpec {
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
  double prior_pi = 0.1;
  std::size_t num_perturbations = 20;
  std::uint64_t seed = 1;
  /// Every run starts from the linear scorer with all weights equal to this.
  /// A random start that inverts the ranking saturates sigma and SGD stalls.
  double init_weight = 0.3;
  /// max_iters 1000 and a constant lr of 0.01; at 0.1 the paired trajectories
  /// separate chaotically and the distance stops tracking N.
  TrainConfig train;

  StabilitySpec();
  void validate() const;
  nlohmann::json to_json() const;
};

/// ||w_T(S) - w_T(S')||_2 where S' replaces row `index` of class `label`
/// with `replacement`; both runs use the same seed and initial model.
double replacement_distance(const Dataset& data, const ScorerModel& init,
                            const TrainConfig& cfg, Label label, std::size_t index,
                            std::span<const double> replacement);

/// Series "pos" and "neg": mean and std over perturbations of the parameter
/// distance, x = dataset size.
ResultTable run_stability_probe(const StabilitySpec& spec);

}  // namespace soprc
