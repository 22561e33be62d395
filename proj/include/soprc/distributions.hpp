#pragma once

#include "soprc/core.hpp"
#include "soprc/rng.hpp"

#include <array>
#include <string>

namespace soprc {

enum class DistKind { binormal, bibeta, offset_uniform };

const char* to_string(DistKind kind) noexcept;
/// Throws SpecError listing the valid kinds.
DistKind dist_kind_from_string(const std::string& name);

/// Two-class synthetic score model.
///   binormal:       (mean, sd)  default s- ~ N(0,1),    s+ ~ N(1,1)
///   bibeta:         (a, b)      default s- ~ Beta(2,5), s+ ~ Beta(5,2)
///   offset_uniform: (lo, hi)    default s- ~ U(0,1),    s+ ~ U(0.5,1.5)
struct ScoreDistribution {
  DistKind kind = DistKind::binormal;
  std::array<double, 2> pos_params{1.0, 1.0};
  std::array<double, 2> neg_params{0.0, 1.0};

  static ScoreDistribution defaults(DistKind kind);

  void validate() const;
  double sample_pos(Rng& rng) const;
  double sample_neg(Rng& rng) const;
  /// Quantile function of the positive class.
  double pos_quantile(double p) const;
  double pos_mean() const;
  double neg_mean() const;
  double pos_sd() const;
  double neg_sd() const;
};

/// round(prior * size) positives, the rest negatives.
ScoreSet draw_population(const ScoreDistribution& dist, std::size_t size, double prior_pi,
                         Rng& rng);

/// Two Gaussian blobs with unit covariance: positives around (+1, ..., +1),
/// negatives around (-1, ..., -1); round(prior * size) positives.
Dataset make_blobs(std::size_t size, double prior_pi, Rng& rng, std::size_t dim = 2);

/// One fresh blob point of the given class.
std::vector<double> draw_blob_point(Label label, Rng& rng, std::size_t dim = 2);

}  // namespace soprc
