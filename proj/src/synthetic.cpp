#include "igahd/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace igahd {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_weights(const Vector& x, int rows, int cols) {
  return Eigen::Map<const RowMajor>(x.data(), rows, cols);
}

Vector flatten(const Matrix& m) {
  Vector out(m.size());
  Eigen::Map<RowMajor>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

double largest_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(sym.rows() - 1);
}

}  // namespace

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "fresh") return SamplingMode::kFresh;
  if (name == "pool") return SamplingMode::kPool;
  if (name == "moment") return SamplingMode::kMoment;
  throw std::invalid_argument("unknown sampling mode '" + std::string(name) +
                              "' (expected fresh, pool or moment)");
}

std::string_view to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::kFresh: return "fresh";
    case SamplingMode::kPool: return "pool";
    case SamplingMode::kMoment: return "moment";
  }
  return "fresh";
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// ---------------------------------------------------------------- regression

RegressionOracle::RegressionOracle(GaussianDataset ds, SamplingMode mode)
    : ds_(std::move(ds)), mode_(mode), moment_(ds_.second_moment()) {
  if (mode_ == SamplingMode::kPool) {
    Rng rng(derive_seed(ds_.seed, 1));
    pool_x_.resize(ds_.n_samples, ds_.dim());
    pool_y_.resize(ds_.n_samples, ds_.outputs());
    for (std::int64_t i = 0; i < ds_.n_samples; ++i) {
      const Vector x = ds_.draw_features(rng);
      pool_x_.row(i) = x.transpose();
      Vector y = ds_.true_weights * x;
      if (ds_.noise_std > 0.0) {
        for (int r = 0; r < y.size(); ++r) y(r) += ds_.noise_std * rng.normal();
      }
      pool_y_.row(i) = y.transpose();
    }
  }
}

int RegressionOracle::dim() const { return ds_.outputs() * ds_.dim(); }

Sample RegressionOracle::draw(Rng& rng) const {
  if (mode_ == SamplingMode::kPool) {
    const auto i = static_cast<Eigen::Index>(rng.below(pool_x_.rows()));
    return {pool_x_.row(i).transpose(), pool_y_.row(i).transpose()};
  }
  Sample s;
  s.features = ds_.draw_features(rng);
  s.target = ds_.true_weights * s.features;
  if (ds_.noise_std > 0.0) {
    for (int r = 0; r < s.target.size(); ++r) s.target(r) += ds_.noise_std * rng.normal();
  }
  return s;
}

Vector RegressionOracle::sample_gradient(const Vector& x, const Sample& s) const {
  const auto a = as_weights(x, ds_.outputs(), ds_.dim());
  const Vector residual = a * s.features - s.target;
  return flatten(2.0 * residual * s.features.transpose());
}

double RegressionOracle::sample_loss(const Vector& x, const Sample& s) const {
  const auto a = as_weights(x, ds_.outputs(), ds_.dim());
  return (a * s.features - s.target).squaredNorm();
}

Vector RegressionOracle::full_gradient(const Vector& x) const {
  const Matrix diff = as_weights(x, ds_.outputs(), ds_.dim()) - ds_.true_weights;
  return flatten(2.0 * diff * moment_);
}

double RegressionOracle::population_risk(const Vector& x) const {
  return excess_risk(x) + ds_.outputs() * ds_.noise_std * ds_.noise_std;
}

double RegressionOracle::excess_risk(const Vector& x) const {
  const Matrix diff = as_weights(x, ds_.outputs(), ds_.dim()) - ds_.true_weights;
  return (diff * moment_).cwiseProduct(diff).sum();
}

Vector RegressionOracle::batch_gradient(const Vector& x, std::int64_t n,
                                        Rng& rng) const {
  if (mode_ == SamplingMode::kMoment && n - 1 >= ds_.dim()) {
    return moment_batch_gradient(x, n, rng);
  }
  return StochasticOracle::batch_gradient(x, n, rng);
}

Vector RegressionOracle::moment_batch_gradient(const Vector& x, std::int64_t n,
                                               Rng& rng) const {
  // With x_i = m + L z_i: sum z_i z_i^T = u u^T + W, u = sum z_i / sqrt(n)
  // standard normal and W ~ Wishart(n - 1, I) independent of u.
  const int d = ds_.dim();
  Vector u(d);
  for (int i = 0; i < d; ++i) u(i) = rng.normal();
  Matrix t = Matrix::Zero(d, d);
  const double dof = static_cast<double>(n - 1);
  for (int i = 0; i < d; ++i) {
    t(i, i) = std::sqrt(rng.chi_square(dof - i));
    for (int j = 0; j < i; ++j) t(i, j) = rng.normal();
  }
  const Matrix& chol = ds_.cholesky_factor;
  const double nn = static_cast<double>(n);
  const Vector lu = chol * u;
  const Matrix lt = chol * t;
  Matrix s = nn * ds_.mean * ds_.mean.transpose();
  s += std::sqrt(nn) * (lu * ds_.mean.transpose() + ds_.mean * lu.transpose());
  s += lu * lu.transpose() + lt * lt.transpose();
  s = 0.5 * (s + s.transpose());

  const Matrix diff = as_weights(x, ds_.outputs(), d) - ds_.true_weights;
  Matrix grad = diff * s;
  if (ds_.noise_std > 0.0) {
    // Given the features, sum_i eps_i x_i^T has rows ~ N(0, noise^2 S).
    const Matrix ls = s.llt().matrixL();
    for (int r = 0; r < ds_.outputs(); ++r) {
      Vector z(d);
      for (int i = 0; i < d; ++i) z(i) = rng.normal();
      grad.row(r) -= ds_.noise_std * (ls * z).transpose();
    }
  }
  return flatten((2.0 / nn) * grad);
}

SyntheticTask generate_regression(const GaussianDataset& ds, SamplingMode mode) {
  auto oracle = std::make_shared<const RegressionOracle>(ds, mode);
  Problem p;
  p.dim = oracle->dim();
  p.name = "regression";
  p.value = [oracle](const Vector& x) { return oracle->population_risk(x); };
  p.gradient = [oracle](const Vector& x) { return oracle->full_gradient(x); };
  p.lipschitz = 2.0 * largest_eigenvalue(ds.second_moment());
  p.min_value = ds.outputs() * ds.noise_std * ds.noise_std;
  p.excess = [oracle](const Vector& x) { return oracle->excess_risk(x); };
  p.minimizer = flatten(ds.true_weights);
  return {std::move(p), std::move(oracle)};
}

// ------------------------------------------------------------ classification

ClassificationOracle::ClassificationOracle(GaussianDataset ds, SamplingMode mode)
    : ds_(std::move(ds)), mode_(mode) {
  if (mode_ == SamplingMode::kMoment) {
    throw std::invalid_argument("classification: moment sampling is only "
                                "available for regression");
  }
  if (ds_.outputs() != 1) {
    throw std::invalid_argument("classification: true weights must be a single row");
  }
  w_star_ = ds_.true_weights.row(0).transpose();
  Rng rng(derive_seed(ds_.seed, 1));
  pool_x_.resize(ds_.n_samples, ds_.dim());
  pool_y_.resize(ds_.n_samples);
  for (std::int64_t i = 0; i < ds_.n_samples; ++i) {
    const Vector x = ds_.draw_features(rng);
    pool_x_.row(i) = x.transpose();
    pool_y_(i) = rng.bernoulli(sigmoid(w_star_.dot(x))) ? 1.0 : 0.0;
  }
  pool_xt_ = pool_x_.transpose();
}

int ClassificationOracle::dim() const { return ds_.dim(); }

Sample ClassificationOracle::draw(Rng& rng) const {
  if (mode_ == SamplingMode::kPool) {
    const auto i = static_cast<Eigen::Index>(rng.below(pool_x_.rows()));
    return {pool_x_.row(i).transpose(), Vector::Constant(1, pool_y_(i))};
  }
  Sample s;
  s.features = ds_.draw_features(rng);
  s.target = Vector::Constant(1, rng.bernoulli(sigmoid(w_star_.dot(s.features))) ? 1.0 : 0.0);
  return s;
}

Vector ClassificationOracle::sample_gradient(const Vector& x, const Sample& s) const {
  return (sigmoid(x.dot(s.features)) - s.target(0)) * s.features;
}

Vector ClassificationOracle::batch_gradient(const Vector& x, std::int64_t n, Rng& rng) const {
  const int d = dim();
  Vector mean = Vector::Zero(d);
  Vector z(d), features(d);
  for (std::int64_t i = 1; i <= n; ++i) {
    double residual = 0.0;
    if (mode_ == SamplingMode::kPool) {
      const auto row = static_cast<Eigen::Index>(rng.below(pool_xt_.cols()));
      const auto sample = pool_xt_.col(row);
      residual = sigmoid(sample.dot(x)) - pool_y_(row);
      mean += (residual * sample - mean) * (1.0 / static_cast<double>(i));
      continue;
    }
    for (int j = 0; j < d; ++j) z(j) = rng.normal();
    features.noalias() = ds_.mean + ds_.cholesky_factor * z;
    const double label = rng.bernoulli(sigmoid(w_star_.dot(features))) ? 1.0 : 0.0;
    residual = sigmoid(x.dot(features)) - label;
    mean += (residual * features - mean) * (1.0 / static_cast<double>(i));
  }
  return mean;
}

double ClassificationOracle::sample_loss(const Vector& x, const Sample& s) const {
  const double z = x.dot(s.features);
  return softplus(z) - s.target(0) * z;
}

Vector ClassificationOracle::full_gradient(const Vector& x) const {
  return pool_gradient(x);
}

double ClassificationOracle::pool_risk(const Vector& w) const {
  const Vector z = pool_x_ * w;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += softplus(z(i)) - pool_y_(i) * z(i);
  }
  return total / static_cast<double>(z.size());
}

Vector ClassificationOracle::pool_gradient(const Vector& w) const {
  Vector r = pool_x_ * w;
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = sigmoid(r(i)) - pool_y_(i);
  return pool_x_.transpose() * r / static_cast<double>(r.size());
}

Matrix ClassificationOracle::pool_hessian(const Vector& w) const {
  Vector z = pool_x_ * w;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z(i));
    z(i) = p * (1.0 - p);
  }
  return pool_x_.transpose() * z.asDiagonal() * pool_x_ / static_cast<double>(z.size());
}

namespace {

// Damped Newton on the pool risk; independent of the first-order steppers.
Vector newton_reference_solve(const ClassificationOracle& oracle) {
  Vector w = Vector::Zero(oracle.dim());
  double fw = oracle.pool_risk(w);
  for (int it = 0; it < 100; ++it) {
    const Vector g = oracle.pool_gradient(w);
    if (g.norm() <= 1e-12) return w;
    const Vector dir = oracle.pool_hessian(w).ldlt().solve(-g);
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = w + step * dir;
      const double ft = oracle.pool_risk(trial);
      if (ft <= fw + 1e-4 * step * g.dot(dir)) {
        w = trial;
        fw = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // Round-off floor: accept a full Newton step if it reduces the gradient.
      const Vector trial = w + dir;
      if (oracle.pool_gradient(trial).norm() < g.norm()) {
        w = trial;
        fw = oracle.pool_risk(w);
      } else {
        break;
      }
    }
  }
  const double gnorm = oracle.pool_gradient(w).norm();
  if (gnorm > 1e-9) {
    throw std::runtime_error("classification reference solve stalled at gradient norm " +
                             std::to_string(gnorm));
  }
  return w;
}

}  // namespace

SyntheticTask generate_classification(const GaussianDataset& ds, SamplingMode mode) {
  auto oracle = std::make_shared<const ClassificationOracle>(ds, mode);
  Problem p;
  p.dim = oracle->dim();
  p.name = "classification";
  p.value = [oracle](const Vector& w) { return oracle->pool_risk(w); };
  p.gradient = [oracle](const Vector& w) { return oracle->pool_gradient(w); };
  const Matrix& px = oracle->pool_features();
  const Matrix pool_moment = px.transpose() * px / static_cast<double>(px.rows());
  p.lipschitz = 0.25 * std::max(largest_eigenvalue(ds.second_moment()),
                                largest_eigenvalue(pool_moment));
  Vector w_ref = newton_reference_solve(*oracle);
  p.min_value = oracle->pool_risk(w_ref);
  p.minimizer = std::move(w_ref);
  return {std::move(p), std::move(oracle)};
}

}  // namespace igahd
