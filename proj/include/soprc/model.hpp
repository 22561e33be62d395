#pragma once

#include "soprc/core.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace soprc {

class Rng;

enum class ScorerKind { linear, mlp1 };

const char* to_string(ScorerKind kind) noexcept;
ScorerKind scorer_kind_from_string(const std::string& name);

/// Score function h_w with a hand-written reverse pass.
///
/// linear: h(x) = B tanh(w.x / B)
/// mlp1:   h(x) = B tanh(a.tanh(W x + c) / B), parameters laid out [W | c | a]
///
/// The bounded output map keeps every score inside [-B, B], the range the
/// positive-score interpolation works on.
class ScorerModel {
 public:
  ScorerModel(ScorerKind kind, std::size_t input_dim, std::size_t hidden_dim,
              double output_bound, std::vector<double> params);

  static ScorerModel linear(std::size_t input_dim, double output_bound = 1.0);
  static ScorerModel linear(std::vector<double> weights, double output_bound = 1.0);
  /// Random init: weights ~ N(0, 1/fan_in), hidden biases 0.
  static ScorerModel random(ScorerKind kind, std::size_t input_dim, std::size_t hidden_dim,
                            double output_bound, Rng& rng);

  ScorerKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  double output_bound() const noexcept { return bound_; }
  ScoreRange range() const noexcept { return {-bound_, bound_}; }

  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  /// Throws ShapeError on a dimension mismatch.
  double forward(std::span<const double> x) const;
  /// grad += d_score * dh(x)/dw
  void accumulate_grad(std::span<const double> x, double d_score, std::span<double> grad) const;

  std::string to_json() const;
  /// Throws ParseError on malformed or inconsistent input.
  static ScorerModel from_json(const std::string& text);

 private:
  ScorerKind kind_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  double bound_;
  std::vector<double> params_;
};

/// sum_i d_scores[i] * dh(xs[i])/dw
std::vector<double> backward_scores(const ScorerModel& model,
                                    std::span<const std::span<const double>> xs,
                                    std::span<const double> d_scores);

}  // namespace soprc
