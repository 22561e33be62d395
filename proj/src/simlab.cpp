#include "soprc/simlab.hpp"

#include "soprc/estimator.hpp"
#include "soprc/interp.hpp"
#include "soprc/kernels.hpp"
#include "soprc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace soprc {

namespace {

constexpr std::uint64_t kPopulationStream = ~std::uint64_t{0};

struct MeanStd {
  double mean;
  double std;
};

/// Sample mean and (n-1)-normalised standard deviation, summed in order.
MeanStd mean_std(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = kernels::ordered_sum(xs) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

nlohmann::json dist_json(const ScoreDistribution& d) {
  return {{"kind", to_string(d.kind)}, {"pos_params", d.pos_params}, {"neg_params", d.neg_params}};
}

nlohmann::json surrogate_json(const SurrogateParams& p) {
  return {{"tau1", p.tau1}, {"tau2", p.tau2}, {"prior_pi", p.prior_pi},
          {"denom_floor", p.denom_floor}};
}

std::vector<double> gather(std::span<const double> src, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = src[idx[i]];
  return out;
}

ScoreRange span_range(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo == *hi) return {*lo - 1.0, *hi + 1.0};
  return {*lo, *hi};
}

struct BatchShape {
  std::size_t n_pos;
  std::size_t n_neg;
};

BatchShape shape_for(std::size_t n, double pi0) {
  const auto n_pos = static_cast<std::size_t>(std::llround(pi0 * static_cast<double>(n)));
  return {n_pos, n - std::min(n, n_pos)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Bias
// ---------------------------------------------------------------------------

void BiasExperimentSpec::validate() const {
  distribution.validate();
  surrogate.validate();
  if (population_size < 2) throw SpecError("population_size must be >= 2");
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior_pi must lie in (0, 1)");
  if (!(sample_rate_pi0 > 0.0 && sample_rate_pi0 < 1.0))
    throw SpecError("sample_rate_pi0 must lie in (0, 1)");
  if (repeats < 2) throw SpecError("repeats must be >= 2");
  if (batch_sizes.empty()) throw SpecError("no batch sizes given");
  const auto n_pos_pop =
      static_cast<std::size_t>(std::llround(prior_pi * static_cast<double>(population_size)));
  const std::size_t n_neg_pop = population_size - n_pos_pop;
  for (std::size_t n : batch_sizes) {
    const auto s = shape_for(n, sample_rate_pi0);
    if (s.n_pos < 1 || s.n_neg < 1 || s.n_pos > n_pos_pop || s.n_neg > n_neg_pop)
      throw SpecError("batch size " + std::to_string(n) + " is infeasible at pi0=" +
                      format_double(sample_rate_pi0));
  }
  if (coupled && (coupled_steps < 1 || !(coupled_beta > 0.0 && coupled_beta <= 1.0)))
    throw SpecError("coupled mode needs steps >= 1 and beta in (0, 1]");
}

nlohmann::json BiasExperimentSpec::to_json() const {
  return {{"distribution", dist_json(distribution)},
          {"population_size", population_size},
          {"prior_pi", prior_pi},
          {"sample_rate_pi0", sample_rate_pi0},
          {"batch_sizes", batch_sizes},
          {"repeats", repeats},
          {"seed", seed},
          {"surrogate", surrogate_json(surrogate)},
          {"coupled", coupled},
          {"coupled_steps", coupled_steps},
          {"coupled_beta", coupled_beta}};
}

BiasPopulation make_bias_population(const BiasExperimentSpec& spec) {
  spec.validate();
  BiasPopulation pop;
  Rng rng = RngHandle{spec.seed, kPopulationStream}.stream();
  pop.scores = draw_population(spec.distribution, spec.population_size, spec.prior_pi, rng);
  pop.params = spec.surrogate;
  pop.params.prior_pi = pop.scores.prior();

  const InterpConfig icfg{pop.scores.pos.size(), span_range(pop.scores.pos)};
  pop.v = interpolate(pop.scores.pos, icfg);
  pop.tpr = kernels::tpr_terms(pop.scores.pos, pop.v, pop.params.tau2);
  pop.reference = surrogate_risk(pop.scores, pop.params);
  return pop;
}

ResultTable run_bias_experiment(const BiasPopulation& pop, const BiasExperimentSpec& spec) {
  spec.validate();
  const std::size_t n_sizes = spec.batch_sizes.size();
  const std::size_t repeats = spec.repeats;
  // err[(r * n_sizes + s) * 2 + {0: proposed, 1: ap}]
  std::vector<double> err(repeats * n_sizes * 2);
  const InterpConfig icfg{pop.scores.pos.size(), span_range(pop.scores.pos)};

  const auto n_rep = static_cast<std::ptrdiff_t>(repeats);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n_rep; ++r) {
    Rng rng = RngHandle{spec.seed, static_cast<std::uint64_t>(r)}.stream();
    for (std::size_t s = 0; s < n_sizes; ++s) {
      const auto shape = shape_for(spec.batch_sizes[s], spec.sample_rate_pi0);
      const auto pi = sample_without_replacement(pop.scores.pos.size(), shape.n_pos, rng);
      const auto ni = sample_without_replacement(pop.scores.neg.size(), shape.n_neg, rng);
      const auto sp = gather(pop.scores.pos, pi);
      const auto sn = gather(pop.scores.neg, ni);

      double proposed;
      if (!spec.coupled) {
        proposed = batch_estimator_from_tpr(sp, sn, gather(pop.tpr, pi), pop.params);
      } else {
        AuxVector v;
        v.values = interpolate(sp, icfg);
        for (std::size_t k = 0; k < spec.coupled_steps; ++k) {
          const auto idx = sample_without_replacement(pop.scores.pos.size(), shape.n_pos, rng);
          v = ema_update(v, interpolate(gather(pop.scores.pos, idx), icfg), spec.coupled_beta);
        }
        proposed = batch_estimator(sp, sn, v, pop.params);
      }
      const double ap = ap_estimator(sp, sn, pop.params);
      err[(r * n_sizes + s) * 2 + 0] = proposed - pop.reference;
      err[(r * n_sizes + s) * 2 + 1] = ap - pop.reference;
    }
  }

  ResultTable table;
  const char* names[2] = {"proposed", "ap"};
  std::vector<double> col(repeats);
  for (int e = 0; e < 2; ++e) {
    for (std::size_t s = 0; s < n_sizes; ++s) {
      for (std::size_t r = 0; r < repeats; ++r) col[r] = err[(r * n_sizes + s) * 2 + e];
      const auto ms = mean_std(col);
      table.add(static_cast<double>(spec.batch_sizes[s]), names[e], ms.mean, ms.std);
    }
  }
  return table;
}

ResultTable run_bias_experiment(const BiasExperimentSpec& spec) {
  return run_bias_experiment(make_bias_population(spec), spec);
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

void InterpExperimentSpec::validate() const {
  distribution.validate();
  if (n_values.empty()) throw SpecError("no n values given");
  if (target_len < 2) throw SpecError("target_len must be >= 2");
  for (std::size_t n : n_values)
    if (n < 2 || n > target_len) throw SpecError("each n must lie in [2, target_len]");
  if (repeats < 2) throw SpecError("repeats must be >= 2");
  if (!(quantile_lo >= 0.0 && quantile_lo < quantile_hi && quantile_hi <= 1.0))
    throw SpecError("quantile window must satisfy 0 <= lo < hi <= 1");
  if (distribution.kind == DistKind::binormal && (quantile_lo == 0.0 || quantile_hi == 1.0))
    throw SpecError("normal quantiles are unbounded at 0 and 1");
}

nlohmann::json InterpExperimentSpec::to_json() const {
  return {{"distribution", dist_json(distribution)},
          {"n_values", n_values},
          {"target_len", target_len},
          {"repeats", repeats},
          {"seed", seed},
          {"quantile_lo", quantile_lo},
          {"quantile_hi", quantile_hi}};
}

ResultTable run_interp_experiment(const InterpExperimentSpec& spec) {
  spec.validate();
  Rng prng = RngHandle{spec.seed, kPopulationStream}.stream();
  std::vector<double> population(spec.target_len);
  for (auto& x : population) x = spec.distribution.sample_pos(prng);
  const InterpConfig icfg{spec.target_len, span_range(population)};
  const auto reference = interpolate(population, icfg);  // sorted descending

  const std::size_t n_vals = spec.n_values.size();
  std::vector<double> err(spec.repeats * n_vals);
  const auto n_rep = static_cast<std::ptrdiff_t>(spec.repeats);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n_rep; ++r) {
    Rng rng = RngHandle{spec.seed, static_cast<std::uint64_t>(r)}.stream();
    for (std::size_t s = 0; s < n_vals; ++s) {
      const auto idx = sample_without_replacement(spec.target_len, spec.n_values[s], rng);
      const auto m = interpolate(gather(population, idx), icfg);
      double worst = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j)
        worst = std::max(worst, std::abs(m[j] - reference[j]));
      err[r * n_vals + s] = worst;
    }
  }

  ResultTable table;
  std::vector<double> col(spec.repeats);
  for (std::size_t s = 0; s < n_vals; ++s) {
    for (std::size_t r = 0; r < spec.repeats; ++r) col[r] = err[r * n_vals + s];
    const auto ms = mean_std(col);
    table.add(static_cast<double>(spec.n_values[s]), "sampled", ms.mean, ms.std);
  }
  const double lo = spec.quantile_lo, width = spec.quantile_hi - spec.quantile_lo;
  const auto& dist = spec.distribution;
  for (std::size_t n : spec.n_values) {
    const double e = interp_sup_error([&](double x) { return dist.pos_quantile(lo + width * x); },
                                      n, 256 * n);
    table.add(static_cast<double>(n), "analytic", e, 0.0);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Moving average
// ---------------------------------------------------------------------------

void EmaExperimentSpec::validate() const {
  distribution.validate();
  range.validate();
  if (num_pos < 2) throw SpecError("num_pos must be >= 2");
  if (batch_pos < 1 || batch_pos > num_pos) throw SpecError("batch_pos must lie in [1, num_pos]");
  if (betas.empty()) throw SpecError("no beta values given");
  for (double b : betas)
    if (!(b > 0.0 && b <= 1.0)) throw SpecError("beta must lie in (0, 1]");
  if (steps < 1) throw SpecError("steps must be >= 1");
  if (repeats < 2) throw SpecError("repeats must be >= 2");
  if (!range.contains(v_init)) throw SpecError("v_init must lie inside the range");
  if (!(fit_snr > 0.0)) throw SpecError("fit_snr must be positive");
}

nlohmann::json EmaExperimentSpec::to_json() const {
  return {{"distribution", dist_json(distribution)},
          {"num_pos", num_pos},
          {"batch_pos", batch_pos},
          {"betas", betas},
          {"steps", steps},
          {"repeats", repeats},
          {"seed", seed},
          {"range", {range.lo, range.hi}},
          {"v_init", v_init},
          {"fit_snr", fit_snr}};
}

EmaExperimentResult run_ema_experiment(const EmaExperimentSpec& spec) {
  spec.validate();
  Rng prng = RngHandle{spec.seed, kPopulationStream}.stream();
  std::vector<double> scores(spec.num_pos);
  for (auto& x : scores) x = std::clamp(spec.distribution.sample_pos(prng), spec.range.lo, spec.range.hi);

  const std::size_t big_n = spec.num_pos;
  const std::size_t steps = spec.steps;
  const std::size_t repeats = spec.repeats;
  const InterpConfig icfg{big_n, spec.range};

  EmaExperimentResult result;
  for (std::size_t b = 0; b < spec.betas.size(); ++b) {
    const double beta = spec.betas[b];
    std::vector<double> traj(repeats * (steps + 1));   // mean over entries of v_t
    std::vector<double> last(repeats * big_n);         // v_{T+1}
    std::vector<double> phi_sum(repeats * big_n), phi_sq(repeats * big_n);

    const auto n_rep = static_cast<std::ptrdiff_t>(repeats);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_rep; ++r) {
      Rng rng = RngHandle{spec.seed, static_cast<std::uint64_t>(r)}.substream(b).stream();
      AuxVector v;
      v.values.assign(big_n, spec.v_init);
      v.beta = beta;
      double* tr = &traj[r * (steps + 1)];
      double* ps = &phi_sum[r * big_n];
      double* pq = &phi_sq[r * big_n];
      tr[0] = kernels::ordered_sum(v.values) / static_cast<double>(big_n);
      for (std::size_t t = 1; t <= steps; ++t) {
        const auto idx = sample_without_replacement(big_n, spec.batch_pos, rng);
        const auto m = interpolate(gather(scores, idx), icfg);
        for (std::size_t k = 0; k < big_n; ++k) {
          ps[k] += m[k];
          pq[k] += m[k] * m[k];
        }
        v = ema_update(v, m, beta);
        tr[t] = kernels::ordered_sum(v.values) / static_cast<double>(big_n);
      }
      std::copy(v.values.begin(), v.values.end(), &last[r * big_n]);
    }

    // Reference E[phi] per entry, pooled over every draw.
    const double draws = static_cast<double>(repeats * steps);
    std::vector<double> phi_mean(big_n, 0.0), phi_var(big_n, 0.0);
    for (std::size_t k = 0; k < big_n; ++k) {
      double s = 0.0, q = 0.0;
      for (std::size_t r = 0; r < repeats; ++r) {
        s += phi_sum[r * big_n + k];
        q += phi_sq[r * big_n + k];
      }
      phi_mean[k] = s / draws;
      phi_var[k] = std::max(0.0, (q - s * s / draws) / (draws - 1.0));
    }
    const double phi_level = kernels::ordered_sum(phi_mean) / static_cast<double>(big_n);

    EmaBetaResult res;
    res.beta = beta;
    std::vector<double> col(repeats);
    for (std::size_t t = 0; t <= steps; ++t) {
      for (std::size_t r = 0; r < repeats; ++r) col[r] = traj[r * (steps + 1) + t];
      const auto ms = mean_std(col);
      res.bias.push_back(std::abs(ms.mean - phi_level));
      res.bias_se.push_back(ms.std / std::sqrt(static_cast<double>(repeats)));
    }
    for (std::size_t k = 0; k < big_n; ++k) {
      if (phi_var[k] <= 1e-15) continue;
      for (std::size_t r = 0; r < repeats; ++r) col[r] = last[r * big_n + k];
      const auto ms = mean_std(col);
      res.var_ratio.push_back(ms.std * ms.std / phi_var[k]);
    }

    // Least-squares slope of log bias against t while the bias is resolved.
    std::vector<double> ts, ys;
    for (std::size_t t = 0; t <= steps; ++t) {
      if (!(res.bias[t] > spec.fit_snr * res.bias_se[t])) break;
      ts.push_back(static_cast<double>(t));
      ys.push_back(std::log(res.bias[t]));
    }
    res.fit_points = ts.size();
    res.decay_slope = std::numeric_limits<double>::quiet_NaN();
    if (ts.size() >= 3) {
      const double tm = kernels::ordered_sum(ts) / static_cast<double>(ts.size());
      const double ym = kernels::ordered_sum(ys) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - tm) * (ys[i] - ym);
        sxx += (ts[i] - tm) * (ts[i] - tm);
      }
      res.decay_slope = sxy / sxx;
    }
    result.per_beta.push_back(std::move(res));
  }
  return result;
}

ResultTable EmaExperimentResult::to_table() const {
  ResultTable table;
  for (const auto& b : per_beta) {
    const std::string name = "bias_beta=" + format_double(b.beta);
    for (std::size_t t = 0; t < b.bias.size(); ++t)
      table.add(static_cast<double>(t + 1), name, b.bias[t], b.bias_se[t]);
  }
  for (const auto& b : per_beta) {
    const auto ms = b.var_ratio.empty() ? MeanStd{0.0, 0.0} : mean_std(b.var_ratio);
    table.add(b.beta, "var_ratio_mean", ms.mean, ms.std);
  }
  for (const auto& b : per_beta) {
    const double mx = b.var_ratio.empty() ? 0.0 : *std::max_element(b.var_ratio.begin(), b.var_ratio.end());
    table.add(b.beta, "var_ratio_max", mx, 0.0);
  }
  for (const auto& b : per_beta) table.add(b.beta, "var_bound", b.bound(), 0.0);
  for (const auto& b : per_beta) table.add(b.beta, "decay_slope", b.decay_slope, 0.0);
  for (const auto& b : per_beta) table.add(b.beta, "decay_expected", std::log(1.0 - b.beta), 0.0);
  return table;
}

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

StabilitySpec::StabilitySpec() {
  train.max_iters = 1000;
  train.lr = LrSchedule::constant(0.01);
  train.eval_every = 0;
}

void StabilitySpec::validate() const {
  if (sizes.empty()) throw SpecError("no dataset sizes given");
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior_pi must lie in (0, 1)");
  if (!std::isfinite(init_weight)) throw SpecError("init_weight must be finite");
  if (num_perturbations < 1) throw SpecError("num_perturbations must be >= 1");
  train.validate();
  for (std::size_t n : sizes) {
    const auto n_pos = static_cast<std::size_t>(std::llround(prior_pi * static_cast<double>(n)));
    if (n_pos < train.n_pos || n - n_pos < train.n_neg)
      throw SpecError("dataset size " + std::to_string(n) + " is too small for the batch shape");
  }
}

nlohmann::json StabilitySpec::to_json() const {
  return {{"sizes", sizes},
          {"prior_pi", prior_pi},
          {"num_perturbations", num_perturbations},
          {"seed", seed},
          {"init_weight", init_weight},
          {"train",
           {{"n_pos", train.n_pos},
            {"n_neg", train.n_neg},
            {"beta", train.beta},
            {"lr_schedule", to_string(train.lr.kind)},
            {"lr", train.lr.value},
            {"weight_decay", train.weight_decay},
            {"lambda1", train.lambda1},
            {"lambda2", train.lambda2},
            {"max_iters", train.max_iters},
            {"seed", train.seed},
            {"surrogate", surrogate_json(train.surrogate)}}}};
}

namespace {

Dataset replace_row(const Dataset& data, Label label, std::size_t index,
                    std::span<const double> replacement) {
  FeatureMatrix pos = data.positives();
  FeatureMatrix neg = data.negatives();
  FeatureMatrix& target = label == Label::positive ? pos : neg;
  if (index >= target.rows()) throw CapacityError("replacement index out of range");
  if (replacement.size() != target.cols()) throw ShapeError("replacement dimension mismatch");
  std::copy(replacement.begin(), replacement.end(), target.row(index).begin());
  return Dataset(std::move(pos), std::move(neg));
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

double replacement_distance(const Dataset& data, const ScorerModel& init, const TrainConfig& cfg,
                            Label label, std::size_t index, std::span<const double> replacement) {
  const auto base = train(data, init, cfg);
  const auto other = train(replace_row(data, label, index, replacement), init, cfg);
  return distance(base.model.params(), other.model.params());
}

ResultTable run_stability_probe(const StabilitySpec& spec) {
  spec.validate();
  const std::size_t dim = 2;
  const ScorerModel init = ScorerModel::linear(std::vector<double>(dim, spec.init_weight));

  const std::size_t p = spec.num_perturbations;
  std::vector<double> dist(spec.sizes.size() * 2 * p);
  for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
    const std::size_t n = spec.sizes[s];
    Rng data_rng = RngHandle{spec.seed, n}.stream();
    const Dataset data = make_blobs(n, spec.prior_pi, data_rng, dim);
    const auto base = train(data, init, spec.train);

    const auto jobs = static_cast<std::ptrdiff_t>(2 * p);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < jobs; ++job) {
      const Label label = job < static_cast<std::ptrdiff_t>(p) ? Label::positive : Label::negative;
      Rng rng = RngHandle{spec.seed, n}.substream(static_cast<std::uint64_t>(job)).stream();
      const std::size_t class_size = label == Label::positive ? data.num_pos() : data.num_neg();
      const auto index = static_cast<std::size_t>(rng.index(class_size));
      const auto point = draw_blob_point(label, rng, dim);
      const auto other = train(replace_row(data, label, index, point), init, spec.train);
      dist[(s * 2) * p + static_cast<std::size_t>(job)] =
          distance(base.model.params(), other.model.params());
    }
  }

  ResultTable table;
  const char* names[2] = {"pos", "neg"};
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
      const auto ms = mean_std(std::span<const double>(&dist[(s * 2 + c) * p], p));
      table.add(static_cast<double>(spec.sizes[s]), names[c], ms.mean, ms.std);
    }
  }
  return table;
}

}  // namespace soprc
