#pragma once

// Hand-rolled generators for property tests. Each draws from an explicit Rng
// so a failing case can be replayed from its seed.

#include <cmath>
#include <cstdint>

#include "igahd/random.hpp"
#include "igahd/types.hpp"

namespace igahd::testing {

inline Vector random_vector(Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

inline Matrix random_orthogonal(Rng& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Q diag(lambda) Q^T with log-uniform eigenvalues in [lo, hi].
inline Matrix random_spd(Rng& rng, int n, double lo = 0.1, double hi = 10.0) {
  Vector lambda(n);
  for (int i = 0; i < n; ++i)
    lambda(i) = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
  const Matrix q = random_orthogonal(rng, n);
  Matrix a = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

// Rank-deficient PSD matrix: B B^T with B n x r.
inline Matrix random_psd(Rng& rng, int n, int rank) {
  Matrix b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = rng.normal();
  Matrix a = b * b.transpose();
  return 0.5 * (a + a.transpose());
}

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace igahd::testing
