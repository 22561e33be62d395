#include "soprc/model.hpp"

#include "soprc/rng.hpp"

#include <json.hpp>

#include <cmath>

namespace soprc {

const char* to_string(ScorerKind kind) noexcept {
  return kind == ScorerKind::linear ? "linear" : "mlp1";
}

ScorerKind scorer_kind_from_string(const std::string& name) {
  if (name == "linear") return ScorerKind::linear;
  if (name == "mlp1") return ScorerKind::mlp1;
  throw SpecError("unknown model kind '" + name + "' (expected linear or mlp1)");
}

namespace {

std::size_t param_count(ScorerKind kind, std::size_t d, std::size_t h) {
  return kind == ScorerKind::linear ? d : h * d + 2 * h;
}

}  // namespace

ScorerModel::ScorerModel(ScorerKind kind, std::size_t input_dim, std::size_t hidden_dim,
                         double output_bound, std::vector<double> params)
    : kind_(kind),
      input_dim_(input_dim),
      hidden_dim_(kind == ScorerKind::linear ? 0 : hidden_dim),
      bound_(output_bound),
      params_(std::move(params)) {
  if (input_dim_ == 0) throw ShapeError("model input dimension must be >= 1");
  if (kind_ == ScorerKind::mlp1 && hidden_dim_ == 0)
    throw ShapeError("mlp1 needs a hidden dimension >= 1");
  if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw SpecError("output bound must be positive");
  if (params_.size() != param_count(kind_, input_dim_, hidden_dim_))
    throw ShapeError("parameter vector has the wrong length");
  for (double p : params_)
    if (!std::isfinite(p)) throw DomainError("non-finite model parameter");
}

ScorerModel ScorerModel::linear(std::size_t input_dim, double output_bound) {
  return ScorerModel(ScorerKind::linear, input_dim, 0, output_bound,
                     std::vector<double>(input_dim, 0.0));
}

ScorerModel ScorerModel::linear(std::vector<double> weights, double output_bound) {
  const std::size_t d = weights.size();
  return ScorerModel(ScorerKind::linear, d, 0, output_bound, std::move(weights));
}

ScorerModel ScorerModel::random(ScorerKind kind, std::size_t input_dim, std::size_t hidden_dim,
                                double output_bound, Rng& rng) {
  const std::size_t h = kind == ScorerKind::linear ? 0 : hidden_dim;
  std::vector<double> p(param_count(kind, input_dim, h), 0.0);
  const double sd_in = 1.0 / std::sqrt(static_cast<double>(input_dim));
  if (kind == ScorerKind::linear) {
    for (auto& w : p) w = rng.normal(0.0, sd_in);
  } else {
    for (std::size_t i = 0; i < h * input_dim; ++i) p[i] = rng.normal(0.0, sd_in);
    const double sd_out = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t k = 0; k < h; ++k) p[h * input_dim + h + k] = rng.normal(0.0, sd_out);
  }
  return ScorerModel(kind, input_dim, h, output_bound, std::move(p));
}

double ScorerModel::forward(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw ShapeError("input has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(input_dim_));
  double z = 0.0;
  if (kind_ == ScorerKind::linear) {
    for (std::size_t l = 0; l < input_dim_; ++l) z += params_[l] * x[l];
  } else {
    const std::size_t d = input_dim_, h = hidden_dim_;
    for (std::size_t k = 0; k < h; ++k) {
      double pre = params_[h * d + k];
      for (std::size_t l = 0; l < d; ++l) pre += params_[k * d + l] * x[l];
      z += params_[h * d + h + k] * std::tanh(pre);
    }
  }
  return bound_ * std::tanh(z / bound_);
}

void ScorerModel::accumulate_grad(std::span<const double> x, double d_score,
                                  std::span<double> grad) const {
  if (x.size() != input_dim_) throw ShapeError("input dimension mismatch");
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer has the wrong length");
  if (d_score == 0.0) return;

  if (kind_ == ScorerKind::linear) {
    double z = 0.0;
    for (std::size_t l = 0; l < input_dim_; ++l) z += params_[l] * x[l];
    const double t = std::tanh(z / bound_);
    const double dz = d_score * (1.0 - t * t);
    for (std::size_t l = 0; l < input_dim_; ++l) grad[l] += dz * x[l];
    return;
  }

  const std::size_t d = input_dim_, h = hidden_dim_;
  std::vector<double> hid(h);
  double z = 0.0;
  for (std::size_t k = 0; k < h; ++k) {
    double pre = params_[h * d + k];
    for (std::size_t l = 0; l < d; ++l) pre += params_[k * d + l] * x[l];
    hid[k] = std::tanh(pre);
    z += params_[h * d + h + k] * hid[k];
  }
  const double t = std::tanh(z / bound_);
  const double dz = d_score * (1.0 - t * t);
  for (std::size_t k = 0; k < h; ++k) {
    grad[h * d + h + k] += dz * hid[k];
    const double dpre = dz * params_[h * d + h + k] * (1.0 - hid[k] * hid[k]);
    grad[h * d + k] += dpre;
    for (std::size_t l = 0; l < d; ++l) grad[k * d + l] += dpre * x[l];
  }
}

std::string ScorerModel::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["input_dim"] = input_dim_;
  j["hidden_dim"] = hidden_dim_;
  j["output_bound"] = bound_;
  j["weights"] = params_;
  return j.dump(2);
}

ScorerModel ScorerModel::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return ScorerModel(scorer_kind_from_string(j.at("kind").get<std::string>()),
                       j.at("input_dim").get<std::size_t>(),
                       j.at("hidden_dim").get<std::size_t>(),
                       j.at("output_bound").get<double>(),
                       j.at("weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("corrupt model checkpoint: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(0, std::string("invalid model checkpoint: ") + e.what());
  }
}

std::vector<double> backward_scores(const ScorerModel& model,
                                    std::span<const std::span<const double>> xs,
                                    std::span<const double> d_scores) {
  if (xs.size() != d_scores.size()) throw ShapeError("one score gradient per input expected");
  std::vector<double> grad(model.params().size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) model.accumulate_grad(xs[i], d_scores[i], grad);
  return grad;
}

}  // namespace soprc
