#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "igahd/dataset.hpp"
#include "igahd/oracle.hpp"
#include "igahd/problem.hpp"
#include "igahd/synthetic.hpp"
#include "support.hpp"

namespace igahd {
namespace {

using testing::central_difference;
using testing::random_psd;
using testing::random_spd;
using testing::random_vector;

// ---- quadratics -------------------------------------------------------------

TEST(Quadratic, IdentityHasZeroMinimum) {
  const Problem p = make_quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  ASSERT_TRUE(p.minimizer && p.min_value);
  EXPECT_EQ(*p.minimizer, Vector::Zero(2));
  EXPECT_EQ(*p.min_value, 0.0);
  EXPECT_DOUBLE_EQ(p.lipschitz, 1.0);
}

TEST(Quadratic, IllConditionedDiagonal) {
  const Problem p = make_quadratic(Vector{{1.0, 1000.0}}.asDiagonal(), Vector::Zero(2));
  EXPECT_DOUBLE_EQ(p.lipschitz, 1000.0);
  EXPECT_NEAR(condition_number(p.quadratic->a), 1000.0, 1e-9);
}

TEST(Quadratic, HandSolvedMinimizer) {
  const Problem p = make_quadratic(Vector{{2.0, 3.0}}.asDiagonal(), Vector{{2.0, 3.0}});
  EXPECT_NEAR((*p.minimizer - Vector::Ones(2)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(*p.min_value, -2.5, 1e-14);
  EXPECT_NEAR(p.value(Vector::Ones(2)), -2.5, 1e-14);
}

TEST(Quadratic, RejectsAsymmetricAndIndefinite) {
  Matrix asym{{1.0, 0.5}, {0.0, 1.0}};
  EXPECT_THROW(make_quadratic(asym, Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(make_quadratic(Vector{{1.0, -0.1}}.asDiagonal(), Vector::Zero(2)),
               std::invalid_argument);
  // Within the -1e-10 tolerance the matrix is accepted as semidefinite.
  EXPECT_NO_THROW(make_quadratic(Vector{{1.0, -1e-12}}.asDiagonal(), Vector::Zero(2)));
}

TEST(Quadratic, SingularMinimizerOnlyWhenKnown) {
  // b outside the range of A: unbounded below, nothing to report.
  const Problem p = make_quadratic(Vector{{1.0, 0.0}}.asDiagonal(), Vector::Ones(2));
  EXPECT_FALSE(p.minimizer.has_value());
  EXPECT_THROW(p.gap(Vector::Zero(2)), std::logic_error);
  // b = 0: the origin is a minimizer (one of many).
  const Problem q = make_quadratic(Vector{{1.0, 0.0}}.asDiagonal(), Vector::Zero(2));
  ASSERT_TRUE(q.minimizer.has_value());
  EXPECT_EQ(*q.min_value, 0.0);
  EXPECT_EQ(q.gap(Vector{{0.0, 3.0}}), 0.0);
}

// ---- properties shared by every problem ---------------------------------------

struct NamedProblem {
  std::string name;
  Problem problem;
};

std::vector<NamedProblem> property_problems() {
  std::vector<NamedProblem> out;
  Rng rng(11);
  for (int i = 0; i < 3; ++i) {
    const int n = 2 + 2 * i;
    out.push_back({"quadratic" + std::to_string(n),
                   make_quadratic(random_spd(rng, n, 0.5, 50.0), random_vector(rng, n))});
  }
  out.push_back({"semidefinite", make_quadratic(random_psd(rng, 5, 3), Vector::Zero(5))});
  out.push_back(
      {"regression", generate_regression(default_dataset(4, 2, 1000, 3), SamplingMode::kFresh)
                         .problem});
  out.push_back(
      {"classification",
       generate_classification(default_dataset(6, 1, 4000, 5), SamplingMode::kFresh).problem});
  return out;
}

TEST(ProblemProperties, GradientMatchesFiniteDifferences) {
  for (const auto& [name, p] : property_problems()) {
    Rng rng(derive_seed(21, p.dim));
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = random_vector(rng, p.dim, 2.0);
      const Vector g = p.gradient(x);
      const Vector fd = central_difference(p.value, x);
      EXPECT_LE((g - fd).lpNorm<Eigen::Infinity>(), 1e-4 * (1.0 + g.norm()))
          << name << " trial " << trial;
    }
  }
}

TEST(ProblemProperties, LipschitzAndConvexOnRandomPairs) {
  for (const auto& [name, p] : property_problems()) {
    Rng rng(derive_seed(22, p.dim));
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = random_vector(rng, p.dim, 3.0);
      const Vector y = random_vector(rng, p.dim, 3.0);
      const Vector gx = p.gradient(x);
      const Vector gy = p.gradient(y);
      EXPECT_LE((gx - gy).norm(), p.lipschitz * (x - y).norm() * (1.0 + 1e-12) + 1e-12)
          << name;
      EXPECT_GE(p.value(y), p.value(x) + gx.dot(y - x) - 1e-10 * (1.0 + std::abs(p.value(x))))
          << name;
    }
  }
}

TEST(ProblemProperties, MinimumIsALowerBoundAndStationary) {
  for (const auto& [name, p] : property_problems()) {
    if (!p.min_value) continue;
    Rng rng(derive_seed(23, p.dim));
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = random_vector(rng, p.dim, 3.0);
      EXPECT_GE(p.value(x), *p.min_value - 1e-12 * (1.0 + std::abs(*p.min_value))) << name;
    }
    ASSERT_TRUE(p.minimizer) << name;
    EXPECT_LE(p.gradient(*p.minimizer).norm(), 1e-10 * (1.0 + p.lipschitz)) << name;
  }
}

// ---- datasets ------------------------------------------------------------------

TEST(Dataset, RejectsNonPositiveDefiniteCovariance) {
  Matrix cov{{1.0, 2.0}, {2.0, 1.0}};
  EXPECT_THROW(make_dataset(Vector::Zero(2), cov, Matrix::Ones(1, 2), 10, 0),
               std::invalid_argument);
  EXPECT_THROW(make_dataset(Vector::Zero(3), Matrix::Identity(2, 2), Matrix::Ones(1, 2), 10, 0),
               std::invalid_argument);
}

TEST(Dataset, EmpiricalMeanMatchesWithinFiveSigma) {
  Rng gen(31);
  const Vector mean{{1.0, -2.0, 0.5}};
  const Matrix cov = random_spd(gen, 3, 0.2, 4.0);
  const GaussianDataset ds = make_dataset(mean, cov, Matrix::Ones(1, 3), 100000, 9);
  Rng rng(ds.seed);
  const int n = 100000;
  Vector acc = Vector::Zero(3);
  for (int i = 0; i < n; ++i) acc += ds.draw_features(rng);
  acc /= n;
  for (int c = 0; c < 3; ++c)
    EXPECT_LE(std::abs(acc(c) - mean(c)), 5.0 * std::sqrt(cov(c, c) / n)) << c;
}

TEST(Dataset, SeedDeterminismAndJsonRoundTrip) {
  const GaussianDataset a = default_dataset(6, 2, 100, 77);
  const GaussianDataset b = default_dataset(6, 2, 100, 77);
  EXPECT_EQ(a.true_weights, b.true_weights);
  const GaussianDataset c = dataset_from_json(dataset_to_json(a));
  EXPECT_EQ(c.mean, a.mean);
  EXPECT_EQ(c.covariance, a.covariance);
  EXPECT_EQ(c.true_weights, a.true_weights);
  EXPECT_EQ(c.n_samples, a.n_samples);
  EXPECT_EQ(c.seed, a.seed);
  Rng r1(5), r2(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.draw_features(r1), c.draw_features(r2));
}

TEST(Dataset, DefaultWeightsInUnitInterval) {
  const GaussianDataset ds = default_dataset(6, 3, 10, 4);
  EXPECT_LT(ds.true_weights.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(ds.mean, Vector::Zero(6));
  EXPECT_EQ(ds.covariance, Matrix::Identity(6, 6));
}

// ---- regression -----------------------------------------------------------------

TEST(Regression, RiskVanishesAtTrueWeights) {
  const GaussianDataset ds = default_dataset(6, 2, 100, 8);
  const SyntheticTask task = generate_regression(ds);
  const Vector m = *task.problem.minimizer;
  EXPECT_NEAR(task.problem.value(m), 0.0, 1e-14);
  EXPECT_LE(task.problem.gradient(m).norm(), 1e-14);
  EXPECT_EQ(*task.problem.min_value, 0.0);
}

TEST(Regression, RowOfOnesHasRiskSix) {
  const GaussianDataset ds =
      make_dataset(Vector::Zero(6), Matrix::Identity(6, 6), Matrix::Zero(1, 6), 100, 0);
  const auto task = generate_regression(ds);
  EXPECT_NEAR(task.problem.value(Vector::Ones(6)), 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(task.problem.lipschitz, 2.0);
}

TEST(Regression, ConditionedFeatureHitsTarget) {
  const GaussianDataset ds = condition_feature(default_dataset(6, 1, 100, 42), 5, 1000.0);
  const double kappa = condition_number(ds.second_moment());
  EXPECT_GE(kappa, 900.0);
  EXPECT_LE(kappa, 1100.0);
  const auto task = generate_regression(ds);
  EXPECT_NEAR(condition_number(task.problem.quadratic ? task.problem.quadratic->a
                                                      : 2.0 * ds.second_moment()),
              kappa, 1e-6 * kappa);
}

TEST(Regression, ClosedFormRiskMatchesMonteCarlo) {
  Rng gen(41);
  const GaussianDataset ds = make_dataset(Vector{{0.5, -0.3, 0.2}}, random_spd(gen, 3, 0.3, 2.0),
                                          Matrix{{0.4, -0.7, 0.1}}, 100, 6, 0.2);
  const auto task = generate_regression(ds, SamplingMode::kFresh);
  const Vector x{{1.0, 0.5, -1.0}};
  Rng rng(99);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = task.oracle->sample_loss(x, task.oracle->draw(rng));
    sum += l;
    sum_sq += l * l;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - task.problem.value(x)), 3.0 * se);
}

TEST(Regression, RejectsWeightShapeMismatch) {
  EXPECT_THROW(make_dataset(Vector::Zero(3), Matrix::Identity(3, 3), Matrix::Ones(1, 4), 10, 0),
               std::invalid_argument);
}

// ---- classification ----------------------------------------------------------------

TEST(Classification, ZeroWeightsGiveLogTwoPerSample) {
  const auto task =
      generate_classification(default_dataset(6, 1, 2000, 12), SamplingMode::kFresh);
  const Vector zero = Vector::Zero(6);
  Rng rng(3);
  for (int i = 0; i < 50; ++i)
    EXPECT_NEAR(task.oracle->sample_loss(zero, task.oracle->draw(rng)), std::numbers::ln2,
                1e-15);
  EXPECT_NEAR(task.problem.value(zero), std::numbers::ln2, 1e-13);
}

TEST(Classification, GradientAtZeroIsCenteredLabelMean) {
  const auto task = generate_classification(default_dataset(6, 1, 3000, 13), SamplingMode::kPool);
  const auto& oracle = dynamic_cast<const ClassificationOracle&>(*task.oracle);
  const Matrix& x = oracle.pool_features();
  const Vector& y = oracle.pool_labels();
  Vector expected = Vector::Zero(6);
  for (Eigen::Index i = 0; i < x.rows(); ++i) expected += (y(i) - 0.5) * x.row(i).transpose();
  expected = -expected / static_cast<double>(x.rows());
  EXPECT_LE((task.problem.gradient(Vector::Zero(6)) - expected).norm(), 1e-14);
}

TEST(Classification, LipschitzBoundCoversPoolHessian) {
  const auto task = generate_classification(default_dataset(6, 1, 3000, 14));
  const auto& oracle = dynamic_cast<const ClassificationOracle&>(*task.oracle);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Matrix h = oracle.pool_hessian(random_vector(rng, 6, 2.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    EXPECT_LE(es.eigenvalues().maxCoeff(), task.problem.lipschitz * (1.0 + 1e-12));
  }
}

// ---- oracles ------------------------------------------------------------------------

std::vector<std::pair<std::string, SyntheticTask>> oracle_tasks() {
  return {
      {"regression/fresh",
       generate_regression(default_dataset(3, 2, 500, 1), SamplingMode::kFresh)},
      {"regression/pool",
       generate_regression(default_dataset(3, 1, 20000, 2), SamplingMode::kPool)},
      {"classification/fresh",
       generate_classification(default_dataset(4, 1, 20000, 3), SamplingMode::kFresh)},
      {"classification/pool",
       generate_classification(default_dataset(4, 1, 2000, 4), SamplingMode::kPool)},
  };
}

TEST(Oracle, PerSampleGradientsAreUnbiased) {
  for (const auto& [name, task] : oracle_tasks()) {
    const StochasticOracle& o = *task.oracle;
    Rng rng(derive_seed(51, o.dim()));
    const Vector x = random_vector(rng, o.dim());
    const int n = 20000;
    Vector sum = Vector::Zero(o.dim()), sum_sq = Vector::Zero(o.dim());
    for (int i = 0; i < n; ++i) {
      const Vector g = o.sample_gradient(x, o.draw(rng));
      sum += g;
      sum_sq += g.cwiseProduct(g);
    }
    const Vector mean = sum / n;
    const Vector sd = (sum_sq / n - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt();
    const Vector full = o.full_gradient(x);
    // Where the sampled distribution and the reference gradient differ by the
    // finite pool (fresh classification draws vs the frozen evaluation pool,
    // pooled regression draws vs the closed-form risk), allow the pool's own
    // sampling error on top.
    const bool mixed = name == "classification/fresh" || name == "regression/pool";
    for (int c = 0; c < o.dim(); ++c)
      EXPECT_LE(std::abs(mean(c) - full(c)),
                5.0 * sd(c) / std::sqrt(n) + (mixed ? 5.0 * sd(c) / std::sqrt(20000.0) : 0.0))
          << name << " component " << c;
  }
}

TEST(Oracle, MinibatchAveragesTwoSamples) {
  const auto task = generate_regression(default_dataset(3, 1, 100, 5), SamplingMode::kFresh);
  const StochasticOracle& o = *task.oracle;
  const Vector x{{0.3, -0.2, 0.9}};
  Rng a(17), b(17);
  const Vector g1 = o.sample_gradient(x, o.draw(a));
  const Vector g2 = o.sample_gradient(x, o.draw(a));
  EXPECT_LE((minibatch_gradient(o, x, 2, b) - 0.5 * (g1 + g2)).norm(), 1e-15);
  EXPECT_EQ(a, b);
}

TEST(Oracle, ZeroVarianceReturnsExactGradient) {
  const Problem p = make_quadratic(Vector{{1.0, 5.0}}.asDiagonal(), Vector{{1.0, 1.0}});
  const ZeroVarianceOracle o(p);
  Rng rng(0);
  const Vector x{{0.5, 2.0}};
  for (std::int64_t n : {1, 3, 1000}) EXPECT_EQ(minibatch_gradient(o, x, n, rng), p.gradient(x));
}

TEST(Oracle, RejectsEmptyBatch) {
  const auto task = generate_regression(default_dataset(2, 1, 10, 1));
  Rng rng(0);
  EXPECT_THROW(minibatch_gradient(*task.oracle, Vector::Zero(2), 0, rng), std::invalid_argument);
}

double batch_variance(const StochasticOracle& o, const Vector& x, std::int64_t n, int reps,
                      std::uint64_t seed) {
  Rng rng(seed);
  const Vector full = o.full_gradient(x);
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) acc += (minibatch_gradient(o, x, n, rng) - full).squaredNorm();
  return acc / reps;
}

TEST(Oracle, VarianceScalesInverselyWithBatch) {
  for (const auto& [name, task] : oracle_tasks()) {
    const Vector x = Vector::Constant(task.oracle->dim(), 0.7);
    const double v1 = batch_variance(*task.oracle, x, 1, 10000, 61);
    for (std::int64_t n : {4, 16}) {
      const double ratio = batch_variance(*task.oracle, x, n, 10000, 62 + n) * n / v1;
      EXPECT_GT(ratio, 1.0 / 1.3) << name << " N=" << n;
      EXPECT_LT(ratio, 1.3) << name << " N=" << n;
    }
  }
}

TEST(Oracle, MomentSamplingMatchesFreshSampling) {
  const GaussianDataset ds = make_dataset(Vector{{0.2, -0.1, 0.4}}, Matrix::Identity(3, 3),
                                          Matrix{{0.5, -1.0, 0.3}}, 100, 3, 0.1);
  const auto fresh = generate_regression(ds, SamplingMode::kFresh);
  const auto moment = generate_regression(ds, SamplingMode::kMoment);
  const Vector x{{1.0, 0.0, -0.5}};
  const int reps = 20000;
  for (std::int64_t n : {1, 8, 64}) {
    Vector mf = Vector::Zero(3), mm = Vector::Zero(3);
    double vf = 0.0, vm = 0.0;
    Rng rf(70 + n), rm(80 + n);
    const Vector full = fresh.oracle->full_gradient(x);
    for (int r = 0; r < reps; ++r) {
      const Vector gf = fresh.oracle->batch_gradient(x, n, rf);
      const Vector gm = moment.oracle->batch_gradient(x, n, rm);
      mf += gf;
      mm += gm;
      vf += (gf - full).squaredNorm();
      vm += (gm - full).squaredNorm();
    }
    mf /= reps;
    mm /= reps;
    const double se = std::sqrt(vf / reps / reps);
    EXPECT_LE((mm - full).norm(), 5.0 * se) << n;
    EXPECT_LE((mf - full).norm(), 5.0 * se) << n;
    EXPECT_NEAR(vm / vf, 1.0, 0.1) << n;
  }
}

TEST(Oracle, SeedDeterminismOfDraws) {
  for (const auto& [name, task] : oracle_tasks()) {
    const Vector x = Vector::Constant(task.oracle->dim(), -0.3);
    Rng a(123), b(123);
    for (int i = 0; i < 20; ++i)
      EXPECT_EQ(task.oracle->batch_gradient(x, 7, a), task.oracle->batch_gradient(x, 7, b))
          << name;
  }
}

}  // namespace
}  // namespace igahd
