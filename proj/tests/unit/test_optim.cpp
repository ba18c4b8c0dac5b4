#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <set>

#include "igahd/optim.hpp"
#include "igahd/series.hpp"
#include "igahd/synthetic.hpp"
#include "support.hpp"

namespace igahd {
namespace {

using testing::random_spd;
using testing::random_vector;

Problem one_dim(double lambda = 1.0) {
  return make_quadratic(Matrix::Constant(1, 1, lambda), Vector::Zero(1));
}

// ---- schedules ------------------------------------------------------------------

TEST(Schedule, RejectsSmallAlphaAndBadEta) {
  EXPECT_THROW(ScheduleSet(2.9, 0.5, StepRule::constant(1.0)), std::invalid_argument);
  EXPECT_THROW(ScheduleSet(3.0, 0.0, StepRule::constant(1.0)), std::invalid_argument);
  EXPECT_THROW(ScheduleSet(3.0, 1.1, StepRule::constant(1.0)), std::invalid_argument);
  EXPECT_NO_THROW(ScheduleSet(3.0, 1.0, StepRule::constant(1.0)));
  // Stochastic mode keeps beta_k strictly below sqrt(s_k)/2 unless overridden.
  EXPECT_THROW(ScheduleSet(3.0, 1.0, StepRule::constant(1.0), ScheduleMode::kStochastic),
               std::invalid_argument);
  EXPECT_NO_THROW(
      ScheduleSet(3.0, 1.0, StepRule::constant(1.0), ScheduleMode::kStochastic, {}, true));
}

TEST(Schedule, IdentitiesHoldToMachinePrecision) {
  Rng rng(3);
  std::vector<double> alphas{3.0, 3.1, 5.0};
  for (int i = 0; i < 3; ++i) alphas.push_back(3.0 + 10.0 * rng.uniform());
  for (double alpha : alphas) {
    const ScheduleSet s(alpha, 0.5, StepRule::constant(0.01));
    EXPECT_EQ(s.alpha_k(0), 0.0);
    EXPECT_EQ(s.t(0), 0.0);
    for (std::int64_t k = 1; k <= 1000000; ++k) {
      const double tk = s.t(k), tn = s.t(k + 1);
      const double tol = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + tk);
      ASSERT_NEAR(tn * s.alpha_k(k), tk - 1.0, tol) << "alpha " << alpha << " k " << k;
      ASSERT_LE(tn * tn - tk * tk, tn + tol * tn) << "alpha " << alpha << " k " << k;
    }
  }
}

TEST(Schedule, BetaWithinHalfRootStep) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double eta = 0.01 + 0.99 * rng.uniform();
    const double p = rng.uniform();
    const ScheduleSet s(3.1, eta, StepRule::power(0.5, p));
    for (std::int64_t k = 1; k < 2000; k += 7) {
      EXPECT_GT(s.beta(k), 0.0);
      EXPECT_LE(s.beta(k), std::sqrt(s.step(k)) / 2.0);
    }
  }
}

TEST(Schedule, PowerStepRulesAreNonincreasing) {
  for (double p : {0.0, 0.2, 0.6, 1.0}) {
    const StepRule rule = StepRule::power(1.0, p, 1.0);
    for (std::int64_t k = 1; k < 100000; ++k) ASSERT_LE(rule(k + 1), rule(k)) << p;
  }
  EXPECT_THROW(StepRule::power(1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(StepRule::constant(0.0), std::invalid_argument);
}

TEST(Schedule, PaperBatchRuleStartsAtTwo) {
  const BatchRule rule = BatchRule::power(2.0, 2.0);
  EXPECT_EQ(rule(1), 2);
  EXPECT_EQ(rule(10), 200);
  EXPECT_THROW(BatchRule::constant(0), std::invalid_argument);
  const BatchRule bad = BatchRule::custom([](std::int64_t) { return std::int64_t{0}; });
  EXPECT_THROW(bad(1), std::invalid_argument);
}

TEST(Schedule, StepBoundChecked) {
  const ScheduleSet s(3.1, 0.5, StepRule::constant(0.002));
  EXPECT_THROW(s.check_step_bound(1000.0), std::invalid_argument);
  EXPECT_NO_THROW(s.check_step_bound(500.0));
}

// ---- deterministic steps --------------------------------------------------------

TEST(IgahdStep, HandWorkedFirstStep) {
  // f = x^2/2, s = 1, alpha = 3, eta = 0.8 so beta = 0.4.
  const Problem p = one_dim();
  const ScheduleSet s(3.0, 0.8, StepRule::constant(1.0));
  OptimizerState st = initial_state(Vector::Ones(1));
  const StepReport r = igahd_step(st, p, s);
  EXPECT_DOUBLE_EQ(r.alpha_k, -2.0);
  EXPECT_DOUBLE_EQ(r.beta, 0.4);
  EXPECT_DOUBLE_EQ(r.y(0), 0.6);
  EXPECT_DOUBLE_EQ(st.x_curr(0), 0.0);
  EXPECT_DOUBLE_EQ(st.x_prev(0), 1.0);
  EXPECT_EQ(st.k, 2);
  EXPECT_DOUBLE_EQ(st.prev_perturbed_grad(0), 1.0);
}

TEST(IgahdStep, ErrorAtYShiftsNextIterateLinearly) {
  Rng rng(5);
  const Problem p = make_quadratic(random_spd(rng, 4), random_vector(rng, 4));
  const ScheduleSet s(3.1, 0.7, StepRule::constant(0.5 / p.lipschitz));
  OptimizerState base = initial_state(random_vector(rng, 4));
  for (int i = 0; i < 5; ++i) igahd_step(base, p, s);
  const Vector delta = random_vector(rng, 4);
  ErrorInjector inj;
  inj.y_error = [delta](std::int64_t, const Vector&) { return delta; };
  OptimizerState a = base, b = base;
  igahd_step(a, p, s);
  const StepReport rb = igahd_step(b, p, s, inj);
  EXPECT_LE((b.x_curr - a.x_curr + s.step(6) * delta).norm(), 1e-14);
  EXPECT_EQ(rb.error_y, delta);
}

TEST(IgahdStep, PowerLawErrorsHaveRequestedNorm) {
  const ErrorInjector inj = power_law_errors(Vector{{3.0, 4.0}}, 2.0, 2.5);
  for (std::int64_t k : {1, 10, 100}) {
    const Vector x = Vector::Zero(2);
    EXPECT_NEAR(inj.x_error(k, x).norm(), 2.0 * std::pow(k, -2.5), 1e-15);
    EXPECT_NEAR(inj.y_error(k, x).norm(), 2.0 * std::pow(k, -2.5), 1e-15);
  }
  EXPECT_THROW(power_law_errors(Vector::Zero(2), 1.0, 1.0), std::invalid_argument);
}

TEST(FistaStep, MatchesIndependentNesterovLoop) {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + trial;
    const Matrix a = random_spd(rng, n, 0.01, 100.0);
    const Vector b = random_vector(rng, n);
    const Problem p = make_quadratic(a, b);
    const double step = 1.0 / p.lipschitz, alpha = 3.0 + trial * 0.5;
    const ScheduleSet s(alpha, 0.5, StepRule::constant(step));
    const Vector x0 = random_vector(rng, n, 2.0);
    OptimizerState st = initial_state(x0);
    Vector x = x0, xp = x0;
    for (int k = 1; k <= 1000; ++k) {
      fista_step(st, p, s);
      const Vector y = x + (1.0 - alpha / k) * (x - xp);
      xp = x;
      x = y - step * (a * y - b);
      ASSERT_LE((st.x_curr - x).norm(), 1e-12 * (1.0 + x.norm())) << trial << " k " << k;
    }
  }
}

TEST(FistaStep, ConstantFunctionIsStationary) {
  const Problem p = make_quadratic(Matrix::Zero(3, 3), Vector::Zero(3));
  const ScheduleSet s(3.1, 0.5, StepRule::constant(1.0));
  const Vector x0{{1.0, -2.0, 3.0}};
  OptimizerState st = initial_state(x0);
  for (int k = 0; k < 100; ++k) igahd_step(st, p, s);
  EXPECT_EQ(st.x_curr, x0);
}

// f(x_k) - f* <= (alpha - 1)^2 ||x0 - x*||^2 / (2 s (k - 1)^2) from the energy bound
// s t_k^2 (f(x_k) - f*) <= E_1 = ||x0 - x*||^2 / 2.
void expect_energy_rate_bound(const Stepper& stepper, const Problem& p, double step,
                              double alpha, const Vector& x0) {
  const double c = (alpha - 1.0) * (alpha - 1.0) * (x0 - *p.minimizer).squaredNorm() / (2.0 * step);
  const Trajectory tr = run(stepper, x0, 10000);
  for (std::size_t i = 1; i < tr.iterates.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    ASSERT_LE((k - 1.0) * (k - 1.0) * p.gap(tr.iterates[i]), c * (1.0 + 1e-9) + 1e-12)
        << "k = " << k;
  }
}

TEST(FistaStep, ScaledGapBoundedOnQuadratics) {
  const Problem one = one_dim(3.0);
  const ScheduleSet s1(3.0, 0.5, StepRule::constant(1.0 / 3.0));
  expect_energy_rate_bound(make_fista_stepper(one, s1), one, 1.0 / 3.0, 3.0, Vector::Ones(1));
  const Problem stiff = make_quadratic(Vector{{1.0, 1000.0}}.asDiagonal(), Vector::Zero(2));
  const ScheduleSet s2(3.0, 0.5, StepRule::constant(1e-3));
  expect_energy_rate_bound(make_fista_stepper(stiff, s2), stiff, 1e-3, 3.0, Vector{{1.0, 1.0}});
  expect_energy_rate_bound(make_igahd_stepper(stiff, s2), stiff, 1e-3, 3.0, Vector{{1.0, 1.0}});
}

// ---- heavy ball --------------------------------------------------------------------

TEST(HeavyBall, RejectsMomentumBoundary) {
  const Problem p = one_dim();
  OptimizerState st = initial_state(Vector::Ones(1));
  EXPECT_THROW(hbf_step(st, p, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(hbf_step(st, p, 0.0, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(hbf_step(st, p, 0.1, 1.0));
}

TEST(HeavyBall, ZeroFieldDecaysMomentumGeometrically) {
  const Problem p = make_quadratic(Matrix::Zero(2, 2), Vector::Zero(2));
  const double a = 0.1, step = 0.25, c = 1.0 - a * std::sqrt(step);
  OptimizerState st = initial_state(Vector::Zero(2));
  st.x_prev = Vector{{-1.0, 2.0}};
  for (int i = 0; i < 50; ++i) {
    const double before = (st.x_curr - st.x_prev).norm();
    hbf_step(st, p, a, step);
    // Exact up to the rounding of x itself (differences of O(1) coordinates).
    EXPECT_NEAR((st.x_curr - st.x_prev).norm(), c * before, 1e-14 * (1.0 + st.x_curr.norm()));
  }
}

TEST(HeavyBall, OscillatesMoreThanHessianDamping) {
  const Problem p = make_quadratic(Vector{{1.0, 1000.0}}.asDiagonal(), Vector::Zero(2));
  const double step = 0.5e-3;
  const ScheduleSet s(3.1, 0.99, StepRule::constant(step));
  auto stiff_crossings = [&](const Stepper& stepper) {
    const Trajectory tr = run(stepper, Vector{{1.0, 1.0}}, 2000);
    std::vector<double> x;
    for (const Vector& v : tr.iterates) x.push_back(v(1));
    return zero_crossings(x);
  };
  EXPECT_GT(stiff_crossings(make_hbf_stepper(p, s, 0.1)),
            stiff_crossings(make_igahd_stepper(p, s)));
}

// ---- stochastic steps ---------------------------------------------------------------

TEST(SigahdStep, ZeroVarianceOracleIsBitIdenticalToIgahd) {
  Rng rng(7);
  const Problem p = make_quadratic(random_spd(rng, 5, 0.1, 20.0), random_vector(rng, 5));
  const auto oracle = std::make_shared<ZeroVarianceOracle>(p);
  const ScheduleSet det(3.1, 0.9, StepRule::constant(1.0 / p.lipschitz));
  const ScheduleSet sto(3.1, 0.9, StepRule::constant(1.0 / p.lipschitz),
                        ScheduleMode::kStochastic, BatchRules::uniform(BatchRule::power(2, 2)));
  const Vector x0 = random_vector(rng, 5);
  OptimizerState a = initial_state(x0, 1), b = initial_state(x0, 1);
  for (int k = 0; k < 500; ++k) {
    igahd_step(a, p, det);
    sigahd_step(b, *oracle, sto);
    ASSERT_TRUE(a.x_curr == b.x_curr) << "k = " << a.k;
  }
  // Same for the beta = 0 variants.
  OptimizerState c = initial_state(x0, 1), d = initial_state(x0, 1);
  for (int k = 0; k < 500; ++k) {
    fista_step(c, p, det);
    fista_step(d, *oracle, sto);
    ASSERT_TRUE(c.x_curr == d.x_curr) << "k = " << c.k;
  }
}

SyntheticTask small_regression() {
  return generate_regression(default_dataset(3, 1, 1000, 9), SamplingMode::kMoment);
}

TEST(SigahdStep, SameSeedSameState) {
  const auto task = small_regression();
  const ScheduleSet s(3.1, 0.9, StepRule::constant(0.5 / task.problem.lipschitz),
                      ScheduleMode::kStochastic, BatchRules::uniform(BatchRule::constant(4)));
  OptimizerState a = initial_state(Vector::Ones(3), 42);
  for (int i = 0; i < 10; ++i) sigahd_step(a, *task.oracle, s);
  OptimizerState b = a;
  const StepReport ra = sigahd_step(a, *task.oracle, s);
  const StepReport rb = sigahd_step(b, *task.oracle, s);
  EXPECT_EQ(a.x_curr, b.x_curr);
  EXPECT_EQ(a.rng, b.rng);
  EXPECT_EQ(ra.grad_y, rb.grad_y);
}

TEST(SigahdStep, ReportsBatchesAndNoise) {
  const auto task = small_regression();
  const ScheduleSet s(3.1, 0.9, StepRule::constant(0.5 / task.problem.lipschitz),
                      ScheduleMode::kStochastic, BatchRules::uniform(BatchRule::power(2, 2)));
  OptimizerState st = initial_state(Vector::Ones(3), 1);
  for (std::int64_t k = 1; k <= 5; ++k) {
    const StepReport r = sigahd_step(st, *task.oracle, s);
    EXPECT_EQ(r.batch_x, 2 * k * k);
    // The lagged term carries a (1 - 1/k) factor, so nothing is drawn at k = 1.
    EXPECT_EQ(r.batch_xm, k == 1 ? 0 : 2 * k * k);
    EXPECT_EQ(r.batch_y, 2 * k * k);
    EXPECT_LE((r.grad_y - r.true_grad_y - r.error_y).norm(), 1e-12);
    EXPECT_LE((r.grad_x - r.true_grad_x - r.error_x).norm(), 1e-12);
  }
}

TEST(SigahdStep, LaggedEstimateUsesPreviousIterate) {
  // With huge batches the lagged estimate concentrates on grad f(x_{k-1}).
  const auto task = small_regression();
  const ScheduleSet s(3.1, 0.9, StepRule::constant(0.5 / task.problem.lipschitz),
                      ScheduleMode::kStochastic,
                      BatchRules::uniform(BatchRule::constant(1000000)));
  OptimizerState st = initial_state(Vector::Ones(3), 2);
  for (int i = 0; i < 3; ++i) sigahd_step(st, *task.oracle, s);
  const Vector xm = st.x_prev;
  const StepReport r = sigahd_step(st, *task.oracle, s);
  const Vector truth = task.problem.gradient(xm);
  EXPECT_LE((r.grad_xm - truth).norm(), 0.02 * (1.0 + truth.norm()));
}

// ---- run ------------------------------------------------------------------------------

TEST(Run, SingleIterationKeepsTwoIterates) {
  const Problem p = one_dim();
  const Trajectory tr =
      run(make_igahd_stepper(p, ScheduleSet(3.1, 0.5, StepRule::constant(0.5))), Vector::Ones(1),
          1);
  EXPECT_EQ(tr.iterates.size(), 2u);
  EXPECT_EQ(tr.status, RunStatus::kCompleted);
  EXPECT_THROW(run(make_igahd_stepper(p, ScheduleSet(3.1, 0.5, StepRule::constant(0.5))),
                   Vector::Ones(1), 0),
               std::invalid_argument);
}

TEST(Run, DescendsOnOneDimensionalQuadratic) {
  const Problem p = one_dim(2.0);
  const Vector x0 = Vector::Constant(1, 3.0);
  const Trajectory tr =
      run(make_igahd_stepper(p, ScheduleSet(3.1, 0.5, StepRule::constant(0.3))), x0, 1000);
  EXPECT_LT(p.gap(tr.iterates.back()), p.gap(x0));
}

TEST(Run, AbortsOnNonFiniteIterate) {
  const Stepper blow_up = [](OptimizerState& st) {
    StepReport r;
    r.k = st.k;
    r.step = 1.0;
    st.x_prev = st.x_curr;
    st.x_curr = st.k == 5 ? Vector::Constant(1, std::nan("")) : st.x_curr;
    r.y = st.x_curr;
    ++st.k;
    return r;
  };
  const Trajectory tr = run(blow_up, Vector::Ones(1), 100);
  EXPECT_EQ(tr.status, RunStatus::kDiverged);
  EXPECT_EQ(tr.diverged_at, 5);
  EXPECT_EQ(tr.iterates.size(), 5u);
  EXPECT_NE(tr.message.find("k = 5"), std::string::npos);
}

TEST(Run, StopFlagInterrupts) {
  std::atomic<bool> stop{false};
  const Problem p = one_dim();
  int calls = 0;
  const Recorder rec = [&](const OptimizerState&, const OptimizerState&, const StepReport&) {
    if (++calls == 7) stop = true;
  };
  RunOptions opt;
  opt.stop = &stop;
  const Trajectory tr = run(make_igahd_stepper(p, ScheduleSet(3.1, 0.5, StepRule::constant(0.5))),
                            Vector::Ones(1), 100, rec, opt);
  EXPECT_EQ(tr.status, RunStatus::kInterrupted);
  EXPECT_EQ(tr.iterates.size(), 8u);
}

TEST(Run, IncreasingCustomStepIsRejected) {
  const Problem p = one_dim(0.001);
  const StepRule bad = StepRule::custom([](std::int64_t k) { return k < 4 ? 0.1 : 0.2; });
  EXPECT_THROW(run(make_igahd_stepper(p, ScheduleSet(3.1, 0.5, bad)), Vector::Ones(1), 10),
               std::logic_error);
}

TEST(Run, SeededStochasticRunsAreDistinctAndReproducible) {
  const auto task = small_regression();
  const ScheduleSet s(3.1, 0.9, StepRule::power(0.5 / task.problem.lipschitz, 0.6),
                      ScheduleMode::kStochastic, BatchRules::uniform(BatchRule::power(2, 2)));
  const Stepper stepper = make_sigahd_stepper(task.oracle, s);
  std::set<std::vector<double>> finals;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RunOptions opt;
    opt.seed = seed;
    const Vector a = run(stepper, Vector::Ones(3), 50, {}, opt).iterates.back();
    const Vector b = run(stepper, Vector::Ones(3), 50, {}, opt).iterates.back();
    ASSERT_EQ(a, b) << seed;
    finals.insert(std::vector<double>(a.data(), a.data() + a.size()));
  }
  EXPECT_EQ(finals.size(), 25u);
}

}  // namespace
}  // namespace igahd
