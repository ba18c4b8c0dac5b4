#include "igahd/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace igahd {

double Problem::gap(const Vector& x) const {
  if (!min_value) {
    throw std::logic_error("problem '" + name +
                           "' has no known minimum value; run a reference "
                           "solve before asking for objective gaps");
  }
  if (excess) return excess(x);
  return value(x) - *min_value;
}

Problem make_quadratic(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("quadratic: A must be a non-empty square matrix");
  }
  if (b.size() != a.rows()) {
    throw std::invalid_argument("quadratic: b has length " +
                                std::to_string(b.size()) + ", expected " +
                                std::to_string(a.rows()));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("quadratic: A is not symmetric");
  }
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(sym.rows() - 1);
  if (lmin < -1e-10) {
    throw std::invalid_argument("quadratic: A has negative eigenvalue " +
                                std::to_string(lmin));
  }

  Problem p;
  p.dim = static_cast<int>(sym.rows());
  p.name = "quadratic";
  p.quadratic = QuadraticForm{sym, b};
  p.value = [sym, b](const Vector& x) {
    return 0.5 * x.dot(sym * x) - b.dot(x);
  };
  p.gradient = [sym, b](const Vector& x) -> Vector { return sym * x - b; };
  p.lipschitz = lmax;
  if (lmin > 1e-12 * std::max(lmax, 1.0)) {
    Vector xs = sym.ldlt().solve(b);
    p.min_value = -0.5 * b.dot(xs);
    p.excess = [sym, xs](const Vector& x) {
      const Vector d = x - xs;
      return 0.5 * d.dot(sym * d);
    };
    p.minimizer = std::move(xs);
  } else if (b.isZero(0.0)) {
    p.min_value = 0.0;
    p.excess = [sym](const Vector& x) { return 0.5 * x.dot(sym * x); };
    p.minimizer = Vector::Zero(p.dim);
  }
  return p;
}

double condition_number(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return ev(ev.size() - 1) / ev(0);
}

}  // namespace igahd
