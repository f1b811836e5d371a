#pragma once

// Critic/actor weights, the controls and disturbances they induce, HJB
// residuals and the continuous-time tuning laws for all N+1 players.

#include <vector>

#include "hadp/game.hpp"

namespace hadp {

struct LearnerState {
  std::vector<Vector> Wv;  ///< critic weights, kappa_i each
  std::vector<Vector> Wa;  ///< actor weights, kappa_i each
  Matrix Wnu;              ///< leader NN weights, mu x alpha

  static LearnerState zeros(const Game& game);
  bool finite() const;
};

struct TuningParams {
  std::vector<double> tau;
  std::vector<double> theta;
  double varrho = 0.0;
  std::vector<Vector> F1;
  std::vector<double> F2;

  void validate(const Game& game) const;
};

struct NormalizedSignals {
  Vector eta;
  double rho = 1.0;
  Vector etabar;
  Vector mu;
};

/// Which summation range the follower actor law uses for its C-term.
enum class ActorSum {
  kAllPlayers,    ///< k = 1..N+1
  kFollowersOnly  ///< k = 1..N
};

/// Shorthand matrices at one (x, nu).
///   C[i][j] = grad phi_j g_j R_jj^-1 R_ij R_jj^-1 g_j^T grad phi_j^T  (kappa_j^2)
///   E[i]    = gamma^-2 grad phi_i h h^T grad phi_i^T                 (kappa_i^2)
///   D[i][j] = grad phi_i g_j R_jj^-1 g_j^T grad phi_j^T              (kappa_i x kappa_j)
///   B[i][j] = g_j R_jj^-1 R_ij R_jj^-1 g_j^T                         (n x n)
///   G[j]    = g_j R_jj^-1 g_j^T                                      (n x n)
/// B[N][j] is B_j^{N+1} of the leader problem.
struct Shorthand {
  std::vector<std::vector<Matrix>> C;
  std::vector<Matrix> E;
  std::vector<std::vector<Matrix>> D;
  std::vector<std::vector<Matrix>> B;
  std::vector<Matrix> G;
};

/// Plant quantities at a single state.
struct PlantEval {
  Vector f;
  std::vector<Matrix> g;
  Matrix p;
  Matrix h;

  static PlantEval at(const PlantModel& model, const Vector& x);
};

Shorthand build_shorthand(const GameSpec& spec, const PlantEval& plant,
                          const std::vector<BasisEval>& basis);

/// -1/2 R_ii^-1 g_i^T grad phi_i^T Wa_i
Vector follower_control(const GameSpec& spec, int i, const BasisEval& basis,
                        const Vector& Wa_i, const Matrix& g_i);
Vector follower_control(const GameSpec& spec, const PlantModel& model, int i,
                        const BasisEval& basis, const Vector& Wa_i,
                        const Vector& x);

/// 1/2 gamma^-2 h^T grad phi_i^T Wa_i
Vector player_disturbance(const GameSpec& spec, const BasisEval& basis,
                          const Vector& Wa_i, const Matrix& h);
Vector player_disturbance(const GameSpec& spec, const PlantModel& model,
                          const BasisEval& basis, const Vector& Wa_i,
                          const Vector& x);

/// eta = grad phi_i (f + sum g_j u_j + p nu + h omega) with rho, etabar, mu.
NormalizedSignals compute_eta(const BasisEval& basis, const PlantModel& model,
                              const Vector& x, const PlayerActions& actions);
NormalizedSignals normalize(Vector eta);

/// The closed-loop estimates every learner needs at one state.
struct ClosedLoopPoint {
  Vector x;
  Vector nu_hat;
  PlantEval plant;
  std::vector<BasisEval> basis;          ///< N+1, evaluated at (x, nu_hat)
  Shorthand sh;
  std::vector<Vector> u_hat;             ///< N
  std::vector<Vector> omega_hat;         ///< N+1, player i's own worst case
  std::vector<double> Q;                 ///< Q_i(x)
  std::vector<NormalizedSignals> signals;
  std::vector<double> residual;          ///< e_i, shorthand form

  /// Actions seen by player i: u_hat, nu_hat and omega_hat_i.
  PlayerActions actions_for(int i) const;
};

ClosedLoopPoint evaluate_point(const Game& game, const LearnerState& state,
                               const Vector& x, const Vector& nu_hat);

/// e_i in shorthand form.
double hjb_residual(const GameSpec& spec, int i, const Shorthand& sh,
                    const BasisEval& basis_i, const Vector& f,
                    const Matrix& p, const LearnerState& state, double Q_i,
                    const Vector& nu_hat);
double hjb_residual(const Game& game, int i, const LearnerState& state,
                    const Vector& x, const Vector& nu_hat);

/// e_i as eta^T Wv_i + Q_i + sum u^T R u + nu^T S nu - gamma^2 omega^T omega.
double hjb_residual_eta_form(const Game& game, int i, const LearnerState& state,
                             const Vector& x, const Vector& nu_hat);

/// The bracket of the critic law, built from its own terms (no residual
/// shortcut): eta^T Wv + 1/4 sum Wa^T C Wa + nu^T S nu - 1/4 Wa^T E Wa + Q.
double critic_bracket(const GameSpec& spec, int i, const ClosedLoopPoint& pt,
                      const LearnerState& state);

/// -tau_i mu_i * bracket
Vector critic_rate(const TuningParams& tuning, int i,
                   const NormalizedSignals& signals, double bracket);

Vector actor_rate_follower(const GameSpec& spec, int i,
                           const TuningParams& tuning,
                           const LearnerState& state,
                           const std::vector<NormalizedSignals>& signals,
                           const Shorthand& sh,
                           ActorSum range = ActorSum::kAllPlayers);

Vector actor_rate_leader(const GameSpec& spec, const TuningParams& tuning,
                         const LearnerState& state,
                         const std::vector<NormalizedSignals>& signals,
                         const Shorthand& sh);

}  // namespace hadp
