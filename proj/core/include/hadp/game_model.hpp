#pragma once

// Game instance: plant dynamics, per-player running costs and Hamiltonians.
//
// Players are indexed from zero: followers are 0..N-1 and the leader is N.

#include <cstdint>
#include <functional>
#include <vector>

#include "hadp/types.hpp"

namespace hadp {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

struct GameSpec {
  int n = 0;               ///< state dimension
  int followers = 0;       ///< N
  std::vector<int> m;      ///< control dimension per follower
  int alpha = 0;           ///< leader action dimension
  int w = 0;               ///< disturbance dimension
  double gamma2 = 1.0;     ///< disturbance attenuation gamma^2
  /// R[i][j] for player i = 0..N, follower j = 0..N-1; m_j x m_j.
  std::vector<std::vector<Matrix>> R;
  /// S[i] for i = 0..N; alpha x alpha.
  std::vector<Matrix> S;
  /// State costs Q_i(x) >= vartheta_i x^T x.
  std::vector<ScalarField> Q;
  std::vector<double> vartheta;
  /// The vartheta lower bound is spot-checked only where |x| >= this radius.
  double vartheta_radius = 0.0;

  int players() const { return followers + 1; }
  int leader() const { return followers; }
};

struct PlantBounds {
  std::vector<double> g;  ///< one per follower
  double p = 0.0;
  double h = 0.0;
};

struct PlantModel {
  VectorField f;
  std::vector<MatrixField> g;  ///< n x m_j
  MatrixField p;               ///< n x alpha
  MatrixField h;               ///< n x w
  PlantBounds bounds;
};

struct PlayerActions {
  std::vector<Vector> u;
  Vector nu;
  Vector omega;

  static PlayerActions zeros(const GameSpec& spec);
};

/// Symmetrizes cost matrices within 1e-12, then checks definiteness, gamma2,
/// Q_i(0) = 0 and the Q_i >= vartheta_i |x|^2 lower bound on seeded samples of
/// `omega`. Throws ConfigError naming the violated invariant.
void validate_spec(GameSpec& spec, const Box& omega, int samples = 512,
                   std::uint64_t seed = 0x5eedULL);

/// Checks f(0) = 0 and that g_j, p, h return matrices of the declared shape.
void validate_model(const GameSpec& spec, const PlantModel& model);

void check_actions(const GameSpec& spec, const PlayerActions& a);

/// f(x) + sum_j g_j(x) u_j + p(x) nu + h(x) omega
Vector eval_drift(const PlantModel& model, const Vector& x,
                  const PlayerActions& a);

/// Q_i(x) + sum_j u_j^T R_ij u_j + nu^T S_i nu - gamma^2 omega^T omega
double running_cost(const GameSpec& spec, int i, const Vector& x,
                    const PlayerActions& a);

double hamiltonian(const GameSpec& spec, const PlantModel& model, int i,
                   const Vector& x, const Vector& grad_v,
                   const PlayerActions& a);

/// Box centre, its corners (dimension <= 10) and `samples` seeded uniform
/// points.
std::vector<Vector> sample_box(const Box& box, int samples, std::uint64_t seed);

/// Sampled sup of the operator norms of g_j, p, h over `region`. Deterministic
/// for a fixed seed; the box corners and centre are always included.
PlantBounds probe_bounds(const PlantModel& model, const Box& region,
                         int samples, std::uint64_t seed);

}  // namespace hadp
