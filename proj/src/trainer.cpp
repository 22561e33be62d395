#include "soprc/trainer.hpp"

#include "soprc/interp.hpp"
#include "soprc/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace soprc {

DivergenceError::DivergenceError(std::size_t iteration, const std::string& what)
    : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

const char* to_string(LrSchedule::Kind kind) noexcept {
  switch (kind) {
    case LrSchedule::Kind::constant: return "constant";
    case LrSchedule::Kind::inverse: return "inverse";
    case LrSchedule::Kind::pl: return "pl";
  }
  return "?";
}

LrSchedule::Kind lr_kind_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::Kind::constant;
  if (name == "inverse") return LrSchedule::Kind::inverse;
  if (name == "pl") return LrSchedule::Kind::pl;
  throw SpecError("unknown lr schedule '" + name + "' (expected constant, inverse or pl)");
}

double lr_at(const LrSchedule& s, std::size_t t) {
  if (t < 1) throw DomainError("learning-rate schedules are indexed from t = 1");
  if (!(s.value > 0.0)) throw SpecError("learning-rate parameter must be positive");
  const double tt = static_cast<double>(t);
  switch (s.kind) {
    case LrSchedule::Kind::constant: return s.value;
    case LrSchedule::Kind::inverse: return s.value / tt;
    case LrSchedule::Kind::pl: return (2.0 * tt + 1.0) / (s.value * (tt + 1.0) * (tt + 1.0));
  }
  return s.value;
}

void TrainConfig::validate() const {
  if (n_pos < 1 || n_neg < 1) throw SpecError("batch needs n_pos, n_neg >= 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw SpecError("beta must lie in (0, 1]");
  if (!(lr.value > 0.0)) throw SpecError("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw SpecError("weight decay must be >= 0");
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw SpecError("lambda1, lambda2 must be >= 0");
  if (max_iters < 1) throw SpecError("max_iters must be >= 1");
  if (prior_override && !(*prior_override > 0.0 && *prior_override < 1.0))
    throw SpecError("prior override must lie in (0, 1)");
  SurrogateParams p = surrogate;
  p.prior_pi = prior_override.value_or(0.5);
  p.validate();
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "iter,loss,reg,grad_norm,lr,val_auprc\n" << std::setprecision(17);
  for (const auto& r : records) {
    out << r.iter << ',' << r.loss << ',' << r.reg << ',' << r.grad_norm << ',' << r.lr << ',';
    if (r.val_auprc) out << *r.val_auprc;
    out << '\n';
  }
}

AuxVector ema_update(const AuxVector& v, std::span<const double> m, double beta_t) {
  if (m.size() != v.values.size())
    throw ShapeError("interpolated vector length " + std::to_string(m.size()) +
                     " != auxiliary length " + std::to_string(v.values.size()));
  if (!(beta_t > 0.0 && beta_t <= 1.0)) throw DomainError("beta_t must lie in (0, 1]");
  AuxVector out = v;
  for (std::size_t k = 0; k < m.size(); ++k)
    out.values[k] = (1.0 - beta_t) * v.values[k] + beta_t * m[k];
  ++out.step_count;
  return out;
}

namespace {

double one_side_part(std::span<const double> s, double lambda, bool below,
                     std::vector<double>& grad) {
  grad.assign(s.size(), 0.0);
  if (lambda == 0.0) return 0.0;
  const double n = static_cast<double>(s.size());
  double mu = 0.0;
  for (double x : s) mu += x;
  mu /= n;

  double value = 0.0, dev_sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dev = s[i] - mu;
    if (below ? s[i] < mu : s[i] > mu) {
      value += dev * dev;
      dev_sum += dev;
      grad[i] = 2.0 * lambda / n * dev;
    }
  }
  // d mu / d s_k = 1/n for every k
  const double shared = -2.0 * lambda / (n * n) * dev_sum;
  for (auto& g : grad) g += shared;
  return lambda / n * value;
}

}  // namespace

SemiVariance semi_variance(std::span<const double> pos, std::span<const double> neg,
                           double lambda1, double lambda2) {
  if (pos.empty()) throw EmptyClassError("no positive scores");
  if (neg.empty()) throw EmptyClassError("no negative scores");
  SemiVariance r;
  r.value = one_side_part(pos, lambda1, true, r.d_pos) + one_side_part(neg, lambda2, false, r.d_neg);
  return r;
}

SurrogateParams effective_params(const TrainConfig& cfg, const Dataset& data) {
  SurrogateParams p = cfg.surrogate;
  p.prior_pi = cfg.prior_override.value_or(data.prior());
  p.validate();
  return p;
}

std::vector<double> score_rows(const ScorerModel& model, const FeatureMatrix& rows) {
  std::vector<double> s(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) s[i] = model.forward(rows.row(i));
  return s;
}

ScoreSet score_dataset(const ScorerModel& model, const Dataset& data) {
  return {score_rows(model, data.positives()), score_rows(model, data.negatives())};
}

Objective evaluate_objective(const ScorerModel& model, const Dataset& data, const Batch& batch,
                             std::span<const double> v, const TrainConfig& cfg,
                             const SurrogateParams& params, const AuxEcho* echo) {
  std::vector<std::span<const double>> xp, xn;
  std::vector<double> sp, sn;
  for (auto i : batch.pos_indices) xp.push_back(data.positives().row(i));
  for (auto i : batch.neg_indices) xn.push_back(data.negatives().row(i));
  for (auto x : xp) sp.push_back(model.forward(x));
  for (auto x : xn) sn.push_back(model.forward(x));

  const InterpConfig icfg{data.num_pos(), model.range()};
  std::vector<double> v_echo;
  if (echo) {
    const auto m = interpolate(sp, icfg);
    v_echo.resize(m.size());
    for (std::size_t k = 0; k < m.size(); ++k)
      v_echo[k] = (1.0 - echo->beta) * echo->v_prev[k] + echo->beta * m[k];
    v = v_echo;
  }

  auto est = batch_estimator_grad(sp, sn, v, params, echo != nullptr);
  const auto reg = semi_variance(sp, sn, cfg.lambda1, cfg.lambda2);
  for (std::size_t i = 0; i < sp.size(); ++i) est.d_pos[i] += reg.d_pos[i];
  for (std::size_t j = 0; j < sn.size(); ++j) est.d_neg[j] += reg.d_neg[j];

  if (echo) {
    for (auto& g : est.d_aux) g *= echo->beta;
    const auto du = interpolate_vjp(sp, icfg, est.d_aux);
    for (std::size_t i = 0; i < sp.size(); ++i) est.d_pos[i] += du[i];
  }

  Objective obj;
  obj.loss = est.value;
  obj.reg = reg.value;
  obj.grad = backward_scores(model, xp, est.d_pos);
  const auto gn = backward_scores(model, xn, est.d_neg);
  for (std::size_t k = 0; k < gn.size(); ++k) obj.grad[k] += gn[k];
  return obj;
}

TrainResult train(const Dataset& data, ScorerModel model, const TrainConfig& cfg,
                  const Dataset* validation) {
  cfg.validate();
  if (model.input_dim() != data.dim())
    throw ShapeError("model expects " + std::to_string(model.input_dim()) +
                     " features, dataset has " + std::to_string(data.dim()));
  if (cfg.n_pos > data.num_pos() || cfg.n_neg > data.num_neg())
    throw CapacityError("batch shape exceeds class sizes");
  const SurrogateParams params = effective_params(cfg, data);

  TrainTrace trace;
  if (cfg.beta * static_cast<double>(cfg.n_pos) > 2.0)
    trace.warnings.push_back("beta * n_pos > 2: moving average may not concentrate");

  Rng rng = RngHandle{cfg.seed, 0}.stream();
  const InterpConfig icfg{data.num_pos(), model.range()};
  AuxVector aux;
  aux.beta = cfg.beta;

  trace.records.reserve(cfg.max_iters);
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    const Batch batch = sample_batch(data, cfg.n_pos, cfg.n_neg, rng);
    std::vector<double> sp;
    for (auto i : batch.pos_indices) sp.push_back(model.forward(data.positives().row(i)));
    const auto m = interpolate(sp, icfg);

    // v_1 is the first interpolant (beta_1 = 1).
    const double beta_t = t == 1 ? 1.0 : cfg.beta;
    const std::vector<double> v_prev = t == 1 ? m : aux.values;
    if (t == 1) {
      aux.values = m;
      aux.step_count = 1;
    } else {
      aux = ema_update(aux, m, beta_t);
    }

    const AuxEcho echo{v_prev, beta_t};
    const Objective obj = evaluate_objective(model, data, batch, aux.values, cfg, params,
                                             cfg.aux_gradient ? &echo : nullptr);

    const double lr = lr_at(cfg.lr, t);
    auto w = model.params();
    double norm2 = 0.0;
    std::vector<double> step(obj.grad.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      step[k] = obj.grad[k] + cfg.weight_decay * w[k];
      norm2 += step[k] * step[k];
    }
    const double grad_norm = std::sqrt(norm2);
    if (!std::isfinite(obj.loss) || !std::isfinite(obj.reg))
      throw DivergenceError(t, "non-finite loss");
    if (!std::isfinite(grad_norm)) throw DivergenceError(t, "non-finite gradient");
    for (std::size_t k = 0; k < w.size(); ++k) {
      w[k] -= lr * step[k];
      if (!std::isfinite(w[k])) throw DivergenceError(t, "non-finite parameters");
    }

    TrainRecord rec{t, obj.loss, obj.reg, grad_norm, lr, std::nullopt};
    if (validation && (t == cfg.max_iters || (cfg.eval_every > 0 && t % cfg.eval_every == 0)))
      rec.val_auprc = empirical_auprc(score_dataset(model, *validation), validation->prior());
    trace.records.push_back(rec);
  }
  return {std::move(model), std::move(aux), std::move(trace)};
}

}  // namespace soprc
