#include "soprc/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace soprc {

const char* to_string(DistKind kind) noexcept {
  switch (kind) {
    case DistKind::binormal: return "binormal";
    case DistKind::bibeta: return "bibeta";
    case DistKind::offset_uniform: return "offset_uniform";
  }
  return "?";
}

DistKind dist_kind_from_string(const std::string& name) {
  if (name == "binormal") return DistKind::binormal;
  if (name == "bibeta") return DistKind::bibeta;
  if (name == "offset_uniform" || name == "uniform") return DistKind::offset_uniform;
  throw SpecError("unknown distribution '" + name +
                  "' (valid kinds: binormal, bibeta, offset_uniform)");
}

ScoreDistribution ScoreDistribution::defaults(DistKind kind) {
  switch (kind) {
    case DistKind::binormal: return {kind, {1.0, 1.0}, {0.0, 1.0}};
    case DistKind::bibeta: return {kind, {5.0, 2.0}, {2.0, 5.0}};
    case DistKind::offset_uniform: return {kind, {0.5, 1.5}, {0.0, 1.0}};
  }
  return {};
}

void ScoreDistribution::validate() const {
  for (const auto& p : {pos_params, neg_params}) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      throw SpecError("distribution parameters must be finite");
    switch (kind) {
      case DistKind::binormal:
        if (!(p[1] > 0.0)) throw SpecError("normal sd must be positive");
        break;
      case DistKind::bibeta:
        if (!(p[0] > 0.0 && p[1] > 0.0)) throw SpecError("beta shapes must be positive");
        break;
      case DistKind::offset_uniform:
        if (!(p[0] < p[1])) throw SpecError("uniform needs lo < hi");
        break;
    }
  }
}

namespace {

double draw(DistKind kind, const std::array<double, 2>& p, Rng& rng) {
  switch (kind) {
    case DistKind::binormal: return rng.normal(p[0], p[1]);
    case DistKind::bibeta: return rng.beta(p[0], p[1]);
    case DistKind::offset_uniform: return rng.uniform(p[0], p[1]);
  }
  return 0.0;
}

double mean_of(DistKind kind, const std::array<double, 2>& p) {
  switch (kind) {
    case DistKind::binormal: return p[0];
    case DistKind::bibeta: return p[0] / (p[0] + p[1]);
    case DistKind::offset_uniform: return 0.5 * (p[0] + p[1]);
  }
  return 0.0;
}

double sd_of(DistKind kind, const std::array<double, 2>& p) {
  switch (kind) {
    case DistKind::binormal: return p[1];
    case DistKind::bibeta: {
      const double s = p[0] + p[1];
      return std::sqrt(p[0] * p[1] / (s * s * (s + 1.0)));
    }
    case DistKind::offset_uniform: return (p[1] - p[0]) / std::sqrt(12.0);
  }
  return 0.0;
}

}  // namespace

double ScoreDistribution::sample_pos(Rng& rng) const { return draw(kind, pos_params, rng); }
double ScoreDistribution::sample_neg(Rng& rng) const { return draw(kind, neg_params, rng); }
double ScoreDistribution::pos_mean() const { return mean_of(kind, pos_params); }
double ScoreDistribution::neg_mean() const { return mean_of(kind, neg_params); }
double ScoreDistribution::pos_sd() const { return sd_of(kind, pos_params); }
double ScoreDistribution::neg_sd() const { return sd_of(kind, neg_params); }

double ScoreDistribution::pos_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  switch (kind) {
    case DistKind::binormal:
      return pos_params[0] - pos_params[1] * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    case DistKind::bibeta: return boost::math::ibeta_inv(pos_params[0], pos_params[1], p);
    case DistKind::offset_uniform: return pos_params[0] + p * (pos_params[1] - pos_params[0]);
  }
  return 0.0;
}

ScoreSet draw_population(const ScoreDistribution& dist, std::size_t size, double prior_pi,
                         Rng& rng) {
  dist.validate();
  if (size < 2) throw SpecError("population size must be >= 2");
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior must lie in (0, 1)");
  const auto n_pos = static_cast<std::size_t>(std::llround(prior_pi * static_cast<double>(size)));
  if (n_pos == 0 || n_pos >= size) throw SpecError("prior leaves a class empty");
  ScoreSet s;
  s.pos.resize(n_pos);
  s.neg.resize(size - n_pos);
  for (auto& x : s.pos) x = dist.sample_pos(rng);
  for (auto& x : s.neg) x = dist.sample_neg(rng);
  return s;
}

std::vector<double> draw_blob_point(Label label, Rng& rng, std::size_t dim) {
  const double mu = label == Label::positive ? 1.0 : -1.0;
  std::vector<double> x(dim);
  for (auto& v : x) v = rng.normal(mu, 1.0);
  return x;
}

Dataset make_blobs(std::size_t size, double prior_pi, Rng& rng, std::size_t dim) {
  if (size < 2) throw SpecError("blob dataset needs at least two points");
  if (!(prior_pi > 0.0 && prior_pi < 1.0)) throw SpecError("prior must lie in (0, 1)");
  const auto n_pos = static_cast<std::size_t>(std::llround(prior_pi * static_cast<double>(size)));
  if (n_pos == 0 || n_pos >= size) throw SpecError("prior leaves a class empty");
  FeatureMatrix pos(dim), neg(dim);
  for (std::size_t i = 0; i < n_pos; ++i) pos.push_back(draw_blob_point(Label::positive, rng, dim));
  for (std::size_t i = n_pos; i < size; ++i)
    neg.push_back(draw_blob_point(Label::negative, rng, dim));
  return Dataset(std::move(pos), std::move(neg));
}

}  // namespace soprc
