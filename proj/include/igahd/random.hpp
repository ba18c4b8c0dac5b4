#pragma once

#include <cstdint>
#include <random>

namespace igahd {

/// Seedable random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All derived variates are computed here rather than through the
/// <random> distributions (which are implementation-defined), so a seed gives
/// bit-identical draws on every platform:
///   - uniform: top 53 bits of one engine word,
///   - normal: Marsaglia polar method (second variate cached),
///   - gamma: Marsaglia-Tsang squeeze, with the alpha < 1 boost.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.has_cached_ == b.has_cached_ &&
           (!a.has_cached_ || a.cached_ == b.cached_);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// splitmix64 finalizer; derives independent stream seeds from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace igahd
