#pragma once

#include <cstdint>

#include <json.hpp>

#include "igahd/random.hpp"
#include "igahd/types.hpp"

namespace igahd {

/// Parameters of a synthetic data distribution X ~ N(mean, covariance) with
/// targets generated from `true_weights` (one row per output).
struct GaussianDataset {
  Vector mean;
  Matrix covariance;
  Matrix cholesky_factor;
  Matrix true_weights;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  /// Standard deviation of additive target noise (regression only).
  double noise_std = 0.0;

  int dim() const { return static_cast<int>(mean.size()); }
  int outputs() const { return static_cast<int>(true_weights.rows()); }
  /// E[X X^T] = covariance + mean mean^T.
  Matrix second_moment() const;
  Vector draw_features(Rng& rng) const;
};

/// Validates the pieces and computes the Cholesky factor. Throws
/// std::invalid_argument when the covariance is not symmetric positive
/// definite or when shapes disagree.
GaussianDataset make_dataset(Vector mean, Matrix covariance, Matrix weights,
                             std::int64_t n_samples, std::uint64_t seed,
                             double noise_std = 0.0);

/// mean 0, identity covariance, weights uniform in (-1, 1) drawn from `seed`.
GaussianDataset default_dataset(int dim, int outputs, std::int64_t n_samples,
                                std::uint64_t seed);

/// Rescales feature `index` (mean and covariance row/column) so that the
/// condition number of the second-moment matrix equals `target`.
GaussianDataset condition_feature(const GaussianDataset& ds, int index,
                                  double target);

nlohmann::json dataset_to_json(const GaussianDataset& ds);
GaussianDataset dataset_from_json(const nlohmann::json& j);

}  // namespace igahd
