#pragma once

#include <cstdint>
#include <memory>

#include "igahd/problem.hpp"
#include "igahd/random.hpp"
#include "igahd/types.hpp"

namespace igahd {

/// One draw zeta from the sampling distribution.
struct Sample {
  Vector features;
  Vector target;
};

/// Source of per-sample gradients grad F(x, zeta) with E[grad F(x, .)] = grad f(x).
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  virtual int dim() const = 0;
  virtual Sample draw(Rng& rng) const = 0;
  virtual Vector sample_gradient(const Vector& x, const Sample& s) const = 0;
  virtual double sample_loss(const Vector& x, const Sample& s) const = 0;
  /// grad f(x); every oracle in this library is synthetic and exposes it.
  virtual Vector full_gradient(const Vector& x) const = 0;

  /// Mean of `n` i.i.d. per-sample gradients at x. The default draws the
  /// samples one by one; subclasses may sample the batch mean directly as
  /// long as the result has the same distribution.
  virtual Vector batch_gradient(const Vector& x, std::int64_t n, Rng& rng) const;
};

/// Minibatch estimate G = (1/n) sum_i grad F(x, zeta_i); rejects n < 1.
Vector minibatch_gradient(const StochasticOracle& oracle, const Vector& x,
                          std::int64_t batch_size, Rng& rng);

/// Degenerate oracle whose per-sample gradient is the exact gradient.
class ZeroVarianceOracle final : public StochasticOracle {
 public:
  explicit ZeroVarianceOracle(Problem problem) : problem_(std::move(problem)) {}

  int dim() const override { return problem_.dim; }
  Sample draw(Rng&) const override { return {}; }
  Vector sample_gradient(const Vector& x, const Sample&) const override {
    return problem_.gradient(x);
  }
  double sample_loss(const Vector& x, const Sample&) const override {
    return problem_.value(x);
  }
  Vector full_gradient(const Vector& x) const override { return problem_.gradient(x); }
  Vector batch_gradient(const Vector& x, std::int64_t, Rng&) const override {
    return problem_.gradient(x);
  }

 private:
  Problem problem_;
};

}  // namespace igahd
