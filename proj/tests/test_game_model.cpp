#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hadp/builtin_models.hpp"

using namespace hadp;

namespace {

Game sec5() {
  Game g = paper_sec5().game;
  validate_game(g);
  return g;
}

PlayerActions actions(const GameSpec& spec, double u1, double u2, double nu, double omega) {
  PlayerActions a = PlayerActions::zeros(spec);
  a.u[0](0) = u1;
  a.u[1](0) = u2;
  a.nu(0) = nu;
  a.omega(0) = omega;
  return a;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(EvalDrift, OriginWithZeroActionsIsZero) {
  const Game g = sec5();
  const Vector dx = eval_drift(g.model, Vector::Zero(2), PlayerActions::zeros(g.spec));
  EXPECT_EQ(dx(0), 0.0);
  EXPECT_EQ(dx(1), 0.0);
}

TEST(EvalDrift, LeaderActionAtOrigin) {
  const Game g = sec5();
  const Vector dx = eval_drift(g.model, Vector::Zero(2), actions(g.spec, 0, 0, 1, 0));
  EXPECT_DOUBLE_EQ(dx(0), 1.0);
  EXPECT_DOUBLE_EQ(dx(1), 5.0);
}

TEST(EvalDrift, FirstFollowerAtOrigin) {
  const Game g = sec5();
  const Vector dx = eval_drift(g.model, Vector::Zero(2), actions(g.spec, 1, 0, 0, 0));
  EXPECT_DOUBLE_EQ(dx(0), 0.0);
  EXPECT_DOUBLE_EQ(dx(1), 3.0);
}

TEST(EvalDrift, DimensionMismatchIsConfigError) {
  const Game g = sec5();
  PlayerActions a = PlayerActions::zeros(g.spec);
  a.nu = Vector::Zero(2);
  EXPECT_THROW(eval_drift(g.model, Vector::Zero(2), a), ConfigError);
}

TEST(EvalDrift, AffineInActionsAtFixedState) {
  const Game g = sec5();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const Vector x = vec2(d(rng), d(rng));
    const PlayerActions a = actions(g.spec, d(rng), d(rng), d(rng), d(rng));
    const PlayerActions b = actions(g.spec, d(rng), d(rng), d(rng), d(rng));
    const double lam = d(rng);
    PlayerActions mix = PlayerActions::zeros(g.spec);
    for (int j = 0; j < 2; ++j) mix.u[j] = lam * a.u[j] + (1 - lam) * b.u[j];
    mix.nu = lam * a.nu + (1 - lam) * b.nu;
    mix.omega = lam * a.omega + (1 - lam) * b.omega;
    const Vector lhs = eval_drift(g.model, x, mix);
    const Vector rhs = lam * eval_drift(g.model, x, a) + (1 - lam) * eval_drift(g.model, x, b);
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(RunningCost, LeaderAtOriginIsZero) {
  const Game g = sec5();
  EXPECT_EQ(running_cost(g.spec, 2, Vector::Zero(2), PlayerActions::zeros(g.spec)), 0.0);
}

TEST(RunningCost, FirstFollowerStateCost) {
  const Game g = sec5();
  EXPECT_DOUBLE_EQ(running_cost(g.spec, 0, vec2(1, 0), PlayerActions::zeros(g.spec)), 2.0);
}

TEST(RunningCost, DisturbancePenalty) {
  const Game g = sec5();
  EXPECT_DOUBLE_EQ(running_cost(g.spec, 2, Vector::Zero(2), actions(g.spec, 0, 0, 0, 1)), -0.6);
}

TEST(RunningCost, IndexOutOfRange) {
  const Game g = sec5();
  EXPECT_THROW(running_cost(g.spec, 3, Vector::Zero(2), PlayerActions::zeros(g.spec)), ConfigError);
  EXPECT_THROW(running_cost(g.spec, -1, Vector::Zero(2), PlayerActions::zeros(g.spec)), ConfigError);
}

TEST(RunningCost, ConvexInControlsConcaveInDisturbance) {
  const Game g = sec5();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 100; ++k) {
    const Vector x = vec2(d(rng), d(rng));
    const PlayerActions a = actions(g.spec, d(rng), d(rng), d(rng), d(rng));
    const int i = k % 3;
    const double h = 0.1 + std::abs(d(rng));
    auto second_diff = [&](auto&& perturb) {
      PlayerActions up = a;
      PlayerActions down = a;
      perturb(up, h);
      perturb(down, -h);
      return running_cost(g.spec, i, x, up) - 2 * running_cost(g.spec, i, x, a) +
             running_cost(g.spec, i, x, down);
    };
    for (int j = 0; j < 2; ++j) {
      const double s = second_diff([j](PlayerActions& p, double t) { p.u[j](0) += t; });
      if (i == j) {
        EXPECT_GT(s, 0.0);
      } else {
        EXPECT_GE(s, -1e-12);
      }
    }
    EXPECT_LT(second_diff([](PlayerActions& p, double t) { p.omega(0) += t; }), 0.0);
  }
}

TEST(Hamiltonian, ZeroInputs) {
  const Game g = sec5();
  EXPECT_EQ(hamiltonian(g.spec, g.model, 0, Vector::Zero(2), Vector::Zero(2),
                        PlayerActions::zeros(g.spec)),
            0.0);
}

TEST(Hamiltonian, HandEvaluation) {
  const Game g = sec5();
  EXPECT_DOUBLE_EQ(hamiltonian(g.spec, g.model, 0, vec2(1, 0), vec2(1, 1),
                               PlayerActions::zeros(g.spec)),
                   2.5);
}

TEST(Hamiltonian, DecomposesIntoCostPlusDrift) {
  const Game g = sec5();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int k = 0; k < 100; ++k) {
    const Vector x = vec2(d(rng), d(rng));
    const Vector gv = vec2(d(rng), d(rng));
    const PlayerActions a = actions(g.spec, d(rng), d(rng), d(rng), d(rng));
    const int i = k % 3;
    const double H = hamiltonian(g.spec, g.model, i, x, gv, a);
    const double split = running_cost(g.spec, i, x, a) + gv.dot(eval_drift(g.model, x, a));
    EXPECT_NEAR(H, split, 1e-13 * (1 + std::abs(H)));
  }
}

TEST(Hamiltonian, GradientDimensionChecked) {
  const Game g = sec5();
  EXPECT_THROW(hamiltonian(g.spec, g.model, 0, Vector::Zero(2), Vector::Zero(3),
                           PlayerActions::zeros(g.spec)),
               ConfigError);
}

TEST(ProbeBounds, FirstFollowerGainBound) {
  const Game g = sec5();
  const PlantBounds b = probe_bounds(g.model, g.region, 10000, 1);
  EXPECT_GE(b.g[0], 2.9);
  EXPECT_LE(b.g[0], 3.0);
}

TEST(ProbeBounds, ConstantIdentityAndZeroMaps) {
  PlantModel m;
  m.f = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  m.g = {[](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }};
  m.p = [](const Vector&) { return Matrix(Matrix::Zero(2, 1)); };
  m.h = [](const Vector&) { return Matrix(Matrix::Zero(2, 1)); };
  const Box box{Vector::Constant(2, -1), Vector::Constant(2, 1)};
  const PlantBounds b = probe_bounds(m, box, 100, 3);
  EXPECT_EQ(b.g[0], 1.0);
  EXPECT_EQ(b.p, 0.0);
  EXPECT_EQ(b.h, 0.0);
}

TEST(ProbeBounds, DeterministicForFixedSeed) {
  const Game g = sec5();
  const PlantBounds a = probe_bounds(g.model, g.region, 500, 42);
  const PlantBounds b = probe_bounds(g.model, g.region, 500, 42);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.h, b.h);
}

TEST(ProbeBounds, EmptyRegionRejected) {
  const Game g = sec5();
  const Box inverted{Vector::Constant(2, 1), Vector::Constant(2, -1)};
  EXPECT_THROW(probe_bounds(g.model, inverted, 10, 1), ConfigError);
  EXPECT_THROW(probe_bounds(g.model, Box{Vector(), Vector()}, 10, 1), ConfigError);
  EXPECT_THROW(probe_bounds(g.model, g.region, 0, 1), ConfigError);
}

TEST(ProbeBounds, MonotoneInNestedBoxes) {
  // Estimates are sampled sups, so nesting holds up to sampling slack.
  const Game g = sec5();
  PlantBounds prev;
  prev.g = {0.0, 0.0};
  for (double r : {0.25, 0.5, 1.0, 2.0}) {
    const Box box{Vector::Constant(2, -r), Vector::Constant(2, r)};
    const PlantBounds b = probe_bounds(g.model, box, 20000, 17);
    const double slack = 1e-3;
    EXPECT_GE(b.g[0], prev.g[0] * (1 - slack));
    EXPECT_GE(b.g[1], prev.g[1] * (1 - slack));
    EXPECT_GE(b.p, prev.p * (1 - slack));
    EXPECT_GE(b.h, prev.h * (1 - slack));
    prev = b;
  }
}

TEST(ProbeBounds, SupersetOfSamplesNeverDecreases) {
  // Same seed, more samples: the sample set only grows.
  const Game g = sec5();
  const PlantBounds a = probe_bounds(g.model, g.region, 500, 3);
  const PlantBounds b = probe_bounds(g.model, g.region, 5000, 3);
  EXPECT_GE(b.g[0], a.g[0]);
  EXPECT_GE(b.g[1], a.g[1]);
  EXPECT_GE(b.p, a.p);
  EXPECT_GE(b.h, a.h);
}

TEST(ValidateSpec, RejectsIndefiniteControlWeight) {
  Game g = paper_sec5().game;
  g.spec.R[0][0] = -Matrix::Identity(1, 1);
  try {
    validate_game(g);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("R_ii must be positive definite"), std::string::npos);
  }
}

TEST(ValidateSpec, RejectsIndefiniteLeaderWeight) {
  Game g = paper_sec5().game;
  g.spec.S[2] = Matrix::Zero(1, 1);
  EXPECT_THROW(validate_game(g), ConfigError);
}

TEST(ValidateSpec, RejectsNonPositiveGamma) {
  Game g = paper_sec5().game;
  g.spec.gamma2 = 0.0;
  EXPECT_THROW(validate_game(g), ConfigError);
}

TEST(ValidateSpec, SymmetrizesTinyAsymmetryAndRejectsLarge) {
  GameSpec spec = linear_test(Matrix::Identity(2, 2) * -1.0).game.spec;
  Matrix r(2, 2);
  r << 2.0, 0.5, 0.5 + 1e-14, 2.0;
  spec.m = {2};
  spec.R = {{r}, {Matrix::Identity(2, 2)}};
  const Box box{Vector::Constant(2, -1), Vector::Constant(2, 1)};
  validate_spec(spec, box);
  EXPECT_EQ(spec.R[0][0](0, 1), spec.R[0][0](1, 0));

  spec.R[0][0](1, 0) = 0.6;
  EXPECT_THROW(validate_spec(spec, box), ConfigError);
}

TEST(ValidateSpec, ChecksStateCostLowerBound) {
  Game g = paper_sec5().game;
  g.spec.vartheta[0] = 5.0;
  EXPECT_THROW(validate_game(g), ConfigError);
}

TEST(ValidateSpec, StateCostCheckedOutsideExclusionRadius) {
  Game g = paper_sec5().game;
  g.spec.vartheta_radius = -0.1;
  EXPECT_THROW(validate_game(g), ConfigError);
  // Q_3 = x1^4 + 2 x2^2 only clears 0.5 |x|^2 far from the origin.
  g = paper_sec5().game;
  g.spec.vartheta[2] = 0.5;
  EXPECT_THROW(validate_game(g), ConfigError);
  g.spec.vartheta_radius = 1.5;
  EXPECT_NO_THROW(validate_game(g));
}

TEST(ValidateModel, DriftMustVanishAtOrigin) {
  Game g = paper_sec5().game;
  g.model.f = [](const Vector& x) { return Vector(x + Vector::Constant(2, 1e-3)); };
  EXPECT_THROW(validate_game(g), ConfigError);
}
