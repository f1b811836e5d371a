#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "hadp/builtin_models.hpp"
#include "hadp/trajectory_io.hpp"

using namespace hadp;

namespace {

Matrix stable_A() {
  Matrix A(2, 2);
  A << 0.0, 1.0, -2.0, -3.0;
  return A;
}

// Error at t=1 of RK4 with all weights frozen at zero against exp(A t) x0.
double rk4_error(const ModelDefaults& d, double dt) {
  const Matrix A = stable_A();
  JointState s{d.sim.x0, LearnerState::zeros(d.game)};
  const StepForcing forcing = StepForcing::zeros(d.game.spec);
  const long steps = std::lround(1.0 / dt);
  for (long k = 0; k < steps; ++k)
    s = step(d.game, d.tuning, d.sim.leader, s, static_cast<double>(k) * dt, dt, forcing, false);
  const Vector exact = A.exp() * d.sim.x0;
  return (s.x - exact).norm();
}

ModelDefaults short_sec5(double t_end) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  d.sim.t_end = t_end;
  return d;
}

bool all_zero(const TrajectoryRow& r) {
  auto zero = [](const auto& list) {
    for (const auto& v : list)
      if (v.norm() != 0.0) return false;
    return true;
  };
  for (double e : r.e)
    if (e != 0.0) return false;
  return r.x.norm() == 0.0 && zero(r.u) && r.nu.norm() == 0.0 && r.omega_applied.norm() == 0.0 &&
         r.e_nu_norm == 0.0 && zero(r.Wv) && zero(r.Wa) && r.Wnu.norm() == 0.0 && zero(r.omega_hat);
}

}  // namespace

TEST(Step, ZeroStateIsEquilibrium) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  JointState s{Vector::Zero(2), LearnerState::zeros(d.game)};
  const StepForcing forcing = StepForcing::zeros(d.game.spec);
  for (int k = 0; k < 100; ++k) s = step(d.game, d.tuning, d.sim.leader, s, k * 1e-3, 1e-3, forcing);
  EXPECT_EQ(s.x.norm(), 0.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s.w.Wv[i].norm(), 0.0);
    EXPECT_EQ(s.w.Wa[i].norm(), 0.0);
  }
  EXPECT_EQ(s.w.Wnu.norm(), 0.0);
}

TEST(Step, Rk4AgainstMatrixExponential) {
  ModelDefaults d = linear_test(stable_A());
  validate_game(d.game);
  const double e1 = rk4_error(d, 0.1);
  const double e2 = rk4_error(d, 0.05);
  const double e3 = rk4_error(d, 0.025);
  EXPECT_LT(e1, 1e-4);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
  EXPECT_GT(e2 / e3, 12.0);
  EXPECT_LT(e2 / e3, 20.0);
}

TEST(Step, FirstStepOfSec5IsSmall) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  const JointState s0{d.sim.x0, initial_weights(d.game, d.sim.init)};
  const double dt = d.sim.dt;
  const JointState s1 = step(d.game, d.tuning, d.sim.leader, s0, 0.0, dt, StepForcing::zeros(d.game.spec));
  ASSERT_TRUE(all_finite(s1.x));
  ASSERT_TRUE(s1.w.finite());
  EXPECT_LT(std::abs(s1.x(0) - s0.x(0)), 10 * dt);
}

TEST(Step, FrozenLearningLeavesWeights) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  const JointState s0{d.sim.x0, initial_weights(d.game, d.sim.init)};
  const JointState s1 = step(d.game, d.tuning, d.sim.leader, s0, 0.0, 1e-3,
                             StepForcing::zeros(d.game.spec), false);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s1.w.Wv[i], s0.w.Wv[i]);
    EXPECT_EQ(s1.w.Wa[i], s0.w.Wa[i]);
  }
  EXPECT_EQ(s1.w.Wnu, s0.w.Wnu);
}

TEST(JointRates, LeaderOverrideIsApplied) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  const JointState s{Vector::Constant(2, 0.3), initial_weights(d.game, d.sim.init)};
  StepForcing f = StepForcing::zeros(d.game.spec);
  const JointRates a = joint_rates(d.game, d.tuning, d.sim.leader, s, f);
  f.nu_override = Vector::Constant(1, 1.0);
  const JointRates b = joint_rates(d.game, d.tuning, d.sim.leader, s, f);
  const Vector dp = d.game.model.p(s.x) * 1.0;
  const Vector nn = d.game.model.p(s.x) * a.point.nu_hat;
  EXPECT_LT(((b.dx - a.dx) - (dp - nn)).norm(), 1e-12);
}

TEST(Run, ZeroEverythingStaysZero) {
  ModelDefaults d = short_sec5(1.0);
  d.sim.x0 = Vector::Zero(2);
  d.sim.probing.amplitude = 0.0;
  d.sim.disturbance.kind = DisturbanceConfig::Kind::kNone;
  d.sim.init.kind = InitWeights::Kind::kExplicit;
  d.sim.init.values = LearnerState::zeros(d.game);
  const RunResult r = run(d.game, d.tuning, d.sim);
  ASSERT_FALSE(r.trajectory.rows.empty());
  for (const TrajectoryRow& row : r.trajectory.rows) EXPECT_TRUE(all_zero(row)) << "t=" << row.t;
  const ConvergenceSummary c = convergence_report(r.trajectory, 0.5);
  for (double e : c.tail_mean_abs_e) EXPECT_EQ(e, 0.0);
  for (double gap : c.critic_actor_gap) EXPECT_EQ(gap, 0.0);
  EXPECT_EQ(c.tail_mean_e_nu, 0.0);
  EXPECT_EQ(c.max_state_norm, 0.0);
}

TEST(Run, IdenticalSeedsGiveIdenticalTrajectories) {
  const ModelDefaults d = short_sec5(2.0);
  const RunResult a = run(d.game, d.tuning, d.sim);
  const RunResult b = run(d.game, d.tuning, d.sim);
  EXPECT_TRUE(a.trajectory == b.trajectory);
  std::ostringstream sa, sb;
  write_trajectory(a.trajectory, sa);
  write_trajectory(b.trajectory, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Run, DifferentProbingSeedChangesTrajectory) {
  ModelDefaults d = short_sec5(0.5);
  const RunResult a = run(d.game, d.tuning, d.sim);
  d.sim.probing.seed += 1;
  const RunResult b = run(d.game, d.tuning, d.sim);
  EXPECT_FALSE(a.trajectory == b.trajectory);
}

TEST(Run, TimesIncreaseAndRowShapesAreConstant) {
  const ModelDefaults d = short_sec5(1.0);
  const RunResult r = run(d.game, d.tuning, d.sim);
  ASSERT_GE(r.trajectory.rows.size(), 2u);
  const TrajectoryRow& first = r.trajectory.rows.front();
  for (std::size_t k = 1; k < r.trajectory.rows.size(); ++k) {
    const TrajectoryRow& row = r.trajectory.rows[k];
    EXPECT_GT(row.t, r.trajectory.rows[k - 1].t);
    EXPECT_EQ(row.x.size(), first.x.size());
    EXPECT_EQ(row.e.size(), first.e.size());
    EXPECT_EQ(row.Wv.size(), first.Wv.size());
    EXPECT_EQ(row.Wnu.rows(), first.Wnu.rows());
  }
  EXPECT_DOUBLE_EQ(r.trajectory.rows.back().t, 1.0);
}

TEST(Run, DetectorFiresWhenNothingMoves) {
  ModelDefaults d = linear_test(stable_A());
  validate_game(d.game);
  d.sim.x0 = Vector::Zero(2);
  d.sim.t_end = 20.0;
  d.sim.dt = 0.01;
  d.sim.convergence.window = 2.0;
  d.sim.convergence.settle = 1.0;
  const RunResult r = run(d.game, d.tuning, d.sim);
  EXPECT_EQ(r.stats.status, RunStatus::kConverged);
  ASSERT_TRUE(r.stats.detector_time.has_value());
  EXPECT_NEAR(*r.stats.detector_time, 2.0, 1e-9);
  EXPECT_NEAR(r.stats.t_final, 3.0, 1e-9);
  ASSERT_TRUE(r.stats.weights_at_detection.has_value());
}

TEST(Run, DivergenceIsReported) {
  Matrix A = 3.0 * Matrix::Identity(2, 2);
  ModelDefaults d = linear_test(A);
  validate_game(d.game);
  d.sim.t_end = 20.0;
  d.sim.dt = 0.01;
  d.sim.learning = false;
  const RunResult r = run(d.game, d.tuning, d.sim);
  EXPECT_EQ(r.stats.status, RunStatus::kDiverged);
  EXPECT_FALSE(r.stats.message.empty());
  EXPECT_LT(r.stats.t_final, 20.0);
}

TEST(Run, BoundedDisturbanceWithoutControlStaysFinite) {
  // The open-loop plant is unstable (linearization eigenvalue about 2.45), so
  // the horizon is kept short enough to stay under the divergence guard.
  ModelDefaults d = short_sec5(5.0);
  d.sim.dt = 0.01;
  d.sim.learning = false;
  d.sim.probing.cutoff = ProbingCutoff::kOff;
  d.sim.init.kind = InitWeights::Kind::kExplicit;
  d.sim.init.values = LearnerState::zeros(d.game);
  const RunResult r = run(d.game, d.tuning, d.sim);
  EXPECT_NE(r.stats.status, RunStatus::kDiverged);
  EXPECT_TRUE(std::isfinite(r.stats.max_state_norm));
  for (const TrajectoryRow& row : r.trajectory.rows) ASSERT_TRUE(all_finite(row.x));
}

TEST(InitialWeights, UniformRangeAndSeed) {
  ModelDefaults d = paper_sec5();
  const LearnerState a = initial_weights(d.game, d.sim.init);
  const LearnerState b = initial_weights(d.game, d.sim.init);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.Wv[i], b.Wv[i]);
    EXPECT_GE(a.Wv[i].minCoeff(), 0.0);
    EXPECT_LE(a.Wv[i].maxCoeff(), 1.0);
    EXPECT_GE(a.Wa[i].minCoeff(), 0.0);
    EXPECT_LE(a.Wa[i].maxCoeff(), 1.0);
  }
  d.sim.init.seed += 1;
  EXPECT_NE(initial_weights(d.game, d.sim.init).Wv[0], a.Wv[0]);
}

TEST(SimConfig, ValidationRejectsBadValues) {
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  SimConfig c = d.sim;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(d.game), ConfigError);
  c = d.sim;
  c.t_end = c.dt / 2;
  EXPECT_THROW(c.validate(d.game), ConfigError);
  c = d.sim;
  c.probing.amplitude = -0.1;
  EXPECT_THROW(c.validate(d.game), ConfigError);
  c = d.sim;
  c.x0 = Vector::Zero(3);
  EXPECT_THROW(c.validate(d.game), ConfigError);
}

TEST(ConvergenceReport, TailWindowAndGap) {
  Trajectory traj;
  traj.layout.n = 1;
  traj.layout.m = {1};
  traj.layout.alpha = 1;
  traj.layout.w = 1;
  traj.layout.kappa = {1, 1};
  traj.layout.mu = 1;
  for (int k = 0; k <= 10; ++k) {
    TrajectoryRow r;
    r.t = k;
    r.x = Vector::Constant(1, k);
    r.u = {Vector::Zero(1)};
    r.nu = Vector::Zero(1);
    r.omega_applied = Vector::Zero(1);
    r.e = {static_cast<double>(k), -2.0 * k};
    r.e_nu_norm = 1.0;
    r.Wv = {Vector::Constant(1, 3.0), Vector::Constant(1, 1.0)};
    r.Wa = {Vector::Constant(1, 1.0), Vector::Constant(1, 1.0)};
    r.Wnu = Matrix::Zero(1, 1);
    r.omega_hat = {Vector::Zero(1), Vector::Zero(1)};
    traj.rows.push_back(r);
  }
  const ConvergenceSummary c = convergence_report_last(traj, 2.0, 4.5);
  ASSERT_EQ(c.tail_mean_abs_e.size(), 2u);
  EXPECT_DOUBLE_EQ(c.tail_mean_abs_e[0], 9.0);
  EXPECT_DOUBLE_EQ(c.tail_mean_abs_e[1], 18.0);
  EXPECT_DOUBLE_EQ(c.tail_mean_e_nu, 1.0);
  EXPECT_DOUBLE_EQ(c.critic_actor_gap[0], 2.0);
  EXPECT_DOUBLE_EQ(c.critic_actor_gap[1], 0.0);
  EXPECT_DOUBLE_EQ(c.max_state_norm, 10.0);
  EXPECT_EQ(c.detector_time, 4.5);
  EXPECT_THROW(convergence_report(Trajectory{}, 0.5), ConfigError);
}

TEST(Run, OpenLoopBlowupStopsAtGuardWithoutNan) {
  ModelDefaults d = short_sec5(30.0);
  d.sim.dt = 0.01;
  d.sim.learning = false;
  d.sim.probing.cutoff = ProbingCutoff::kOff;
  d.sim.init.kind = InitWeights::Kind::kExplicit;
  d.sim.init.values = LearnerState::zeros(d.game);
  const RunResult r = run(d.game, d.tuning, d.sim);
  EXPECT_EQ(r.stats.status, RunStatus::kDiverged);
  for (const TrajectoryRow& row : r.trajectory.rows) ASSERT_TRUE(all_finite(row.x));
}
