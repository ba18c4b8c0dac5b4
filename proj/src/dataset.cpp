#include "igahd/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "igahd/problem.hpp"

namespace igahd {

Matrix GaussianDataset::second_moment() const {
  return covariance + mean * mean.transpose();
}

Vector GaussianDataset::draw_features(Rng& rng) const {
  Vector z(dim());
  for (int i = 0; i < dim(); ++i) z(i) = rng.normal();
  return mean + cholesky_factor * z;
}

GaussianDataset make_dataset(Vector mean, Matrix covariance, Matrix weights,
                             std::int64_t n_samples, std::uint64_t seed,
                             double noise_std) {
  const auto d = mean.size();
  if (d == 0) throw std::invalid_argument("dataset: empty mean vector");
  if (covariance.rows() != d || covariance.cols() != d) {
    throw std::invalid_argument("dataset: covariance must be " +
                                std::to_string(d) + "x" + std::to_string(d));
  }
  if (weights.cols() != d || weights.rows() < 1) {
    throw std::invalid_argument("dataset: weights must have " +
                                std::to_string(d) + " columns");
  }
  if (n_samples < 1) throw std::invalid_argument("dataset: n_samples must be >= 1");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("dataset: noise_std must be >= 0");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("dataset: covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("dataset: covariance is not positive definite");
  }
  GaussianDataset ds;
  ds.mean = std::move(mean);
  ds.covariance = std::move(covariance);
  ds.cholesky_factor = llt.matrixL();
  ds.true_weights = std::move(weights);
  ds.n_samples = n_samples;
  ds.seed = seed;
  ds.noise_std = noise_std;
  return ds;
}

GaussianDataset default_dataset(int dim, int outputs, std::int64_t n_samples,
                                std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  Matrix w(outputs, dim);
  for (int r = 0; r < outputs; ++r) {
    for (int c = 0; c < dim; ++c) w(r, c) = 2.0 * rng.uniform() - 1.0;
  }
  return make_dataset(Vector::Zero(dim), Matrix::Identity(dim, dim), w,
                      n_samples, seed);
}

namespace {

Matrix scaled_moment(const GaussianDataset& ds, int index, double c) {
  Matrix m = ds.second_moment();
  m.row(index) *= c;
  m.col(index) *= c;
  return m;
}

}  // namespace

GaussianDataset condition_feature(const GaussianDataset& ds, int index,
                                  double target) {
  if (index < 0 || index >= ds.dim()) {
    throw std::invalid_argument("condition_feature: feature index out of range");
  }
  if (!(target >= 1.0)) {
    throw std::invalid_argument("condition_feature: target must be >= 1");
  }
  // Bisection on log(c); the condition number is unimodal in c for the
  // moment matrices used here, so search the branch c >= c_min.
  auto cond = [&](double log_c) {
    return condition_number(scaled_moment(ds, index, std::exp(log_c)));
  };
  double lo = 0.0;
  double hi = std::log(1e8);
  if (cond(lo) > target) {
    // Shrinking the feature may be needed instead; search below 1.
    hi = lo;
    lo = std::log(1e-8);
    if (cond(lo) < target) {
      throw std::invalid_argument("condition_feature: target not reachable");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cond(mid) > target ? lo : hi) = mid;
    }
  } else {
    if (cond(hi) < target) {
      throw std::invalid_argument("condition_feature: target not reachable");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cond(mid) < target ? lo : hi) = mid;
    }
  }
  const double c = std::exp(0.5 * (lo + hi));
  Vector mean = ds.mean;
  mean(index) *= c;
  Matrix cov = ds.covariance;
  cov.row(index) *= c;
  cov.col(index) *= c;
  return make_dataset(std::move(mean), std::move(cov), ds.true_weights,
                      ds.n_samples, ds.seed, ds.noise_std);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument(std::string("dataset.") + field +
                                ": expected a non-empty array of rows");
  }
  Matrix m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) {
      throw std::invalid_argument(std::string("dataset.") + field +
                                  ": ragged rows");
    }
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json dataset_to_json(const GaussianDataset& ds) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(ds.mean.data(), ds.mean.data() + ds.mean.size());
  j["covariance"] = matrix_to_json(ds.covariance);
  j["weights"] = matrix_to_json(ds.true_weights);
  j["seed"] = ds.seed;
  j["n_samples"] = ds.n_samples;
  j["noise_std"] = ds.noise_std;
  return j;
}

GaussianDataset dataset_from_json(const nlohmann::json& j) {
  const auto mean_v = j.at("mean").get<std::vector<double>>();
  Vector mean = Eigen::Map<const Vector>(mean_v.data(), mean_v.size());
  return make_dataset(std::move(mean), matrix_from_json(j.at("covariance"), "covariance"),
                      matrix_from_json(j.at("weights"), "weights"),
                      j.at("n_samples").get<std::int64_t>(),
                      j.at("seed").get<std::uint64_t>(),
                      j.value("noise_std", 0.0));
}

}  // namespace igahd
