#pragma once

#include <memory>
#include <string_view>

#include "igahd/dataset.hpp"
#include "igahd/oracle.hpp"
#include "igahd/problem.hpp"

namespace igahd {

/// How a synthetic oracle produces its samples.
///   kFresh  - draw every (x, y) pair from the data distribution,
///   kPool   - draw uniformly (with replacement) from the fixed n_samples pool,
///   kMoment - regression only: draw the batch's sufficient statistics
///             (sum x x^T via a Bartlett-decomposed Wishart, and the noise
///             cross term given it) so a batch costs O(d^3) for any size.
///             Batch means have exactly the kFresh distribution.
enum class SamplingMode { kFresh, kPool, kMoment };

SamplingMode parse_sampling_mode(std::string_view name);
std::string_view to_string(SamplingMode mode);

struct SyntheticTask {
  Problem problem;
  std::shared_ptr<const StochasticOracle> oracle;
};

/// Linear least squares with targets y = M x + noise. Parameters are the
/// entries of the weight matrix A (outputs x dim), stored row-major.
class RegressionOracle final : public StochasticOracle {
 public:
  RegressionOracle(GaussianDataset ds, SamplingMode mode);

  int dim() const override;
  Sample draw(Rng& rng) const override;
  Vector sample_gradient(const Vector& x, const Sample& s) const override;
  double sample_loss(const Vector& x, const Sample& s) const override;
  Vector full_gradient(const Vector& x) const override;
  Vector batch_gradient(const Vector& x, std::int64_t n, Rng& rng) const override;

  /// trace((A - M)(Sigma + m m^T)(A - M)^T) + outputs * noise_std^2.
  double population_risk(const Vector& x) const;
  /// population_risk(x) minus the noise floor, computed without cancellation.
  double excess_risk(const Vector& x) const;
  const GaussianDataset& dataset() const { return ds_; }

 private:
  Vector moment_batch_gradient(const Vector& x, std::int64_t n, Rng& rng) const;

  GaussianDataset ds_;
  SamplingMode mode_;
  Matrix moment_;
  Matrix pool_x_;  // n_samples x dim, pool mode only
  Matrix pool_y_;  // n_samples x outputs
};

/// Logistic regression with labels Y ~ Bernoulli(sigmoid(w* . x)).
class ClassificationOracle final : public StochasticOracle {
 public:
  ClassificationOracle(GaussianDataset ds, SamplingMode mode);

  int dim() const override;
  Sample draw(Rng& rng) const override;
  Vector sample_gradient(const Vector& x, const Sample& s) const override;
  double sample_loss(const Vector& x, const Sample& s) const override;
  /// Same draws and running mean as the generic version, without per-sample allocation.
  Vector batch_gradient(const Vector& x, std::int64_t n, Rng& rng) const override;
  /// Gradient of the evaluation-pool risk.
  Vector full_gradient(const Vector& x) const override;

  double pool_risk(const Vector& w) const;
  Vector pool_gradient(const Vector& w) const;
  Matrix pool_hessian(const Vector& w) const;
  const Matrix& pool_features() const { return pool_x_; }
  const Vector& pool_labels() const { return pool_y_; }
  const GaussianDataset& dataset() const { return ds_; }

 private:
  GaussianDataset ds_;
  SamplingMode mode_;
  Vector w_star_;
  Matrix pool_x_;
  Matrix pool_xt_;  // transposed copy: one contiguous column per sample
  Vector pool_y_;
};

double sigmoid(double z);
/// log(1 + e^z) without overflow.
double softplus(double z);

/// Population least-squares risk in closed form; f* = outputs * noise^2 at A = M.
SyntheticTask generate_regression(const GaussianDataset& ds,
                                  SamplingMode mode = SamplingMode::kMoment);

/// Logistic risk on the frozen evaluation pool; f* and the minimizer come
/// from a Newton reference solve to gradient norm <= 1e-12.
SyntheticTask generate_classification(const GaussianDataset& ds,
                                      SamplingMode mode = SamplingMode::kFresh);

}  // namespace igahd
