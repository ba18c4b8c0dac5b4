#include "igahd/oracle.hpp"

#include <stdexcept>

namespace igahd {

Vector StochasticOracle::batch_gradient(const Vector& x, std::int64_t n,
                                        Rng& rng) const {
  // Running mean: a batch of identical gradients averages to that gradient
  // exactly.
  Vector mean = sample_gradient(x, draw(rng));
  for (std::int64_t i = 2; i <= n; ++i) {
    const Vector g = sample_gradient(x, draw(rng));
    mean += (g - mean) / static_cast<double>(i);
  }
  return mean;
}

Vector minibatch_gradient(const StochasticOracle& oracle, const Vector& x,
                          std::int64_t batch_size, Rng& rng) {
  if (batch_size < 1) {
    throw std::invalid_argument("minibatch_gradient: batch size must be >= 1, got " +
                                std::to_string(batch_size));
  }
  return oracle.batch_gradient(x, batch_size, rng);
}

}  // namespace igahd
