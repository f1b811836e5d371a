#include "hadp/learners.hpp"

#include <cmath>
#include <sstream>

namespace hadp {

void validate_game(Game& game) {
  validate_spec(game.spec, game.region);
  validate_model(game.spec, game.model);
  const int players = game.spec.players();
  require(static_cast<int>(game.value_bases.size()) == players,
          "one value basis per player (N+1) is required");
  for (int i = 0; i < players; ++i) {
    const PolyBasis& b = game.value_bases[static_cast<std::size_t>(i)];
    require(b.n() == game.spec.n && b.alpha() == game.spec.alpha,
            "value basis must be over (x, nu)");
  }
  require(!game.value_bases.back().depends_on_nu(),
          "the leader's value basis must depend on x only");
  require(game.leader_basis.n() == game.spec.n && game.leader_basis.alpha() == 0,
          "leader NN basis must be over x only");
  if (game.model.bounds.g.empty()) {
    game.model.bounds = probe_bounds(game.model, game.region, 4096, 0xb0b0ULL);
  }
}

LearnerState LearnerState::zeros(const Game& game) {
  LearnerState s;
  for (int i = 0; i < game.players(); ++i) {
    s.Wv.push_back(Vector::Zero(game.kappa(i)));
    s.Wa.push_back(Vector::Zero(game.kappa(i)));
  }
  s.Wnu = Matrix::Zero(game.mu(), game.spec.alpha);
  return s;
}

bool LearnerState::finite() const {
  for (const Vector& v : Wv)
    if (!v.allFinite()) return false;
  for (const Vector& v : Wa)
    if (!v.allFinite()) return false;
  return Wnu.allFinite();
}

void TuningParams::validate(const Game& game) const {
  const auto players = static_cast<std::size_t>(game.players());
  require(tau.size() == players, "tau needs N+1 entries");
  require(theta.size() == players, "theta needs N+1 entries");
  require(F1.size() == players, "F1 needs N+1 entries");
  require(F2.size() == players, "F2 needs N+1 entries");
  for (std::size_t i = 0; i < players; ++i) {
    require(tau[i] > 0.0, "critic rates tau_i must be > 0");
    require(theta[i] > 0.0, "actor rates theta_i must be > 0");
    require(F1[i].size() == game.kappa(static_cast<int>(i)), "F1_i must have kappa_i entries");
  }
  require(varrho > 0.0, "leader rate varrho must be > 0");
}

PlantEval PlantEval::at(const PlantModel& model, const Vector& x) {
  PlantEval pe;
  pe.f = model.f(x);
  pe.g.reserve(model.g.size());
  for (const auto& gj : model.g) pe.g.push_back(gj(x));
  pe.p = model.p(x);
  pe.h = model.h(x);
  return pe;
}

Shorthand build_shorthand(const GameSpec& spec, const PlantEval& plant,
                          const std::vector<BasisEval>& basis) {
  const int N = spec.followers;
  Shorthand sh;
  std::vector<Matrix> Rinv(N);
  std::vector<Matrix> gradG(N);  // grad phi_j g_j, kappa_j x m_j
  sh.G.resize(N);
  for (int j = 0; j < N; ++j) {
    Rinv[j] = spec.R[j][j].inverse();
    sh.G[j] = plant.g[j] * Rinv[j] * plant.g[j].transpose();
    gradG[j] = basis[j].grad_x * plant.g[j];
  }
  sh.C.assign(N + 1, std::vector<Matrix>(N));
  sh.D.assign(N + 1, std::vector<Matrix>(N));
  sh.B.assign(N + 1, std::vector<Matrix>(N));
  sh.E.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j < N; ++j) {
      const Matrix mid = Rinv[j] * spec.R[i][j] * Rinv[j];
      sh.C[i][j] = gradG[j] * mid * gradG[j].transpose();
      sh.B[i][j] = plant.g[j] * mid * plant.g[j].transpose();
      sh.D[i][j] = basis[i].grad_x * sh.G[j] * basis[j].grad_x.transpose();
    }
    const Matrix gh = basis[i].grad_x * plant.h;
    sh.E[i] = (gh * gh.transpose()) / spec.gamma2;
  }
  return sh;
}

Vector follower_control(const GameSpec& spec, int i, const BasisEval& basis,
                        const Vector& Wa_i, const Matrix& g_i) {
  require(i >= 0 && i < spec.followers, "follower index out of range");
  const Vector grad_v = basis.grad_x.transpose() * Wa_i;
  return -0.5 * spec.R[i][i].llt().solve(g_i.transpose() * grad_v);
}

Vector follower_control(const GameSpec& spec, const PlantModel& model, int i,
                        const BasisEval& basis, const Vector& Wa_i,
                        const Vector& x) {
  return follower_control(spec, i, basis, Wa_i, model.g[static_cast<std::size_t>(i)](x));
}

Vector player_disturbance(const GameSpec& spec, const BasisEval& basis,
                          const Vector& Wa_i, const Matrix& h) {
  return (0.5 / spec.gamma2) * (h.transpose() * (basis.grad_x.transpose() * Wa_i));
}

Vector player_disturbance(const GameSpec& spec, const PlantModel& model,
                          const BasisEval& basis, const Vector& Wa_i,
                          const Vector& x) {
  return player_disturbance(spec, basis, Wa_i, model.h(x));
}

NormalizedSignals normalize(Vector eta) {
  NormalizedSignals s;
  s.rho = eta.squaredNorm() + 1.0;
  s.etabar = eta / s.rho;
  s.mu = s.etabar / s.rho;
  s.eta = std::move(eta);
  return s;
}

NormalizedSignals compute_eta(const BasisEval& basis, const PlantModel& model,
                              const Vector& x, const PlayerActions& actions) {
  return normalize(basis.grad_x * eval_drift(model, x, actions));
}

PlayerActions ClosedLoopPoint::actions_for(int i) const {
  PlayerActions a;
  a.u = u_hat;
  a.nu = nu_hat;
  a.omega = omega_hat[static_cast<std::size_t>(i)];
  return a;
}

ClosedLoopPoint evaluate_point(const Game& game, const LearnerState& state,
                               const Vector& x, const Vector& nu_hat) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  ClosedLoopPoint pt;
  pt.x = x;
  pt.nu_hat = nu_hat;
  pt.plant = PlantEval::at(game.model, x);
  pt.basis.reserve(N + 1);
  for (int i = 0; i <= N; ++i) pt.basis.push_back(eval_all(game.value_bases[i], x, nu_hat));
  pt.sh = build_shorthand(spec, pt.plant, pt.basis);

  pt.u_hat.resize(N);
  for (int j = 0; j < N; ++j)
    pt.u_hat[j] = follower_control(spec, j, pt.basis[j], state.Wa[j], pt.plant.g[j]);
  pt.omega_hat.resize(N + 1);
  for (int i = 0; i <= N; ++i)
    pt.omega_hat[i] = player_disturbance(spec, pt.basis[i], state.Wa[i], pt.plant.h);

  // Shared part of the closed-loop drift; each player adds its own omega_hat.
  Vector common = pt.plant.f + pt.plant.p * nu_hat;
  for (int j = 0; j < N; ++j) common.noalias() += pt.plant.g[j] * pt.u_hat[j];

  pt.Q.resize(N + 1);
  pt.signals.resize(N + 1);
  pt.residual.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    pt.Q[i] = spec.Q[i](x);
    const Vector drift = common + pt.plant.h * pt.omega_hat[i];
    pt.signals[i] = normalize(pt.basis[i].grad_x * drift);
    pt.residual[i] = hjb_residual(spec, i, pt.sh, pt.basis[i], pt.plant.f,
                                  pt.plant.p, state, pt.Q[i], nu_hat);
  }
  return pt;
}

double hjb_residual(const GameSpec& spec, int i, const Shorthand& sh,
                    const BasisEval& basis_i, const Vector& f, const Matrix& p,
                    const LearnerState& state, double Q_i,
                    const Vector& nu_hat) {
  require(i >= 0 && i <= spec.followers, "player index out of range");
  const int N = spec.followers;
  const Vector& Wa_i = state.Wa[i];
  const Vector& Wv_i = state.Wv[i];
  double e = Q_i + nu_hat.dot(spec.S[i] * nu_hat);
  Vector inner = basis_i.grad_x * f + basis_i.grad_x * (p * nu_hat) + 0.5 * sh.E[i] * Wa_i;
  for (int j = 0; j < N; ++j) {
    e += 0.25 * state.Wa[j].dot(sh.C[i][j] * state.Wa[j]);
    inner.noalias() -= 0.5 * sh.D[i][j] * state.Wa[j];
  }
  e -= 0.25 * Wa_i.dot(sh.E[i] * Wa_i);
  e += Wv_i.dot(inner);
  return e;
}

double hjb_residual(const Game& game, int i, const LearnerState& state,
                    const Vector& x, const Vector& nu_hat) {
  const ClosedLoopPoint pt = evaluate_point(game, state, x, nu_hat);
  return pt.residual[static_cast<std::size_t>(i)];
}

double hjb_residual_eta_form(const Game& game, int i, const LearnerState& state,
                             const Vector& x, const Vector& nu_hat) {
  const GameSpec& spec = game.spec;
  require(i >= 0 && i <= spec.followers, "player index out of range");
  PlayerActions a;
  a.nu = nu_hat;
  for (int j = 0; j < spec.followers; ++j) {
    const BasisEval bj = eval_all(game.value_bases[j], x, nu_hat);
    a.u.push_back(follower_control(spec, game.model, j, bj, state.Wa[j], x));
  }
  const BasisEval bi = eval_all(game.value_bases[i], x, nu_hat);
  a.omega = player_disturbance(spec, game.model, bi, state.Wa[i], x);
  const NormalizedSignals s = compute_eta(bi, game.model, x, a);
  return s.eta.dot(state.Wv[i]) + running_cost(spec, i, x, a);
}

double critic_bracket(const GameSpec& spec, int i, const ClosedLoopPoint& pt,
                      const LearnerState& state) {
  double b = pt.signals[i].eta.dot(state.Wv[i]) + pt.Q[i] +
             pt.nu_hat.dot(spec.S[i] * pt.nu_hat) -
             0.25 * state.Wa[i].dot(pt.sh.E[i] * state.Wa[i]);
  for (int j = 0; j < spec.followers; ++j)
    b += 0.25 * state.Wa[j].dot(pt.sh.C[i][j] * state.Wa[j]);
  return b;
}

Vector critic_rate(const TuningParams& tuning, int i,
                   const NormalizedSignals& signals, double bracket) {
  return -tuning.tau[static_cast<std::size_t>(i)] * bracket * signals.mu;
}

Vector actor_rate_follower(const GameSpec& spec, int i,
                           const TuningParams& tuning,
                           const LearnerState& state,
                           const std::vector<NormalizedSignals>& signals,
                           const Shorthand& sh, ActorSum range) {
  require(i >= 0 && i < spec.followers, "follower index out of range");
  const Vector& Wa = state.Wa[i];
  const Vector& Wv = state.Wv[i];
  Vector bracket = tuning.F2[i] * Wa - tuning.F1[i] * signals[i].etabar.dot(Wv);
  const int last = range == ActorSum::kAllPlayers ? spec.followers : spec.followers - 1;
  for (int k = 0; k <= last; ++k) {
    bracket.noalias() -= 0.25 * (sh.C[k][i] * Wa) * signals[k].mu.dot(state.Wv[k]);
  }
  bracket.noalias() += 0.25 * (sh.E[i] * Wa) * signals[i].mu.dot(Wv);
  return -tuning.theta[i] * bracket;
}

Vector actor_rate_leader(const GameSpec& spec, const TuningParams& tuning,
                         const LearnerState& state,
                         const std::vector<NormalizedSignals>& signals,
                         const Shorthand& sh) {
  const int L = spec.leader();
  const Vector& Wa = state.Wa[L];
  const Vector& Wv = state.Wv[L];
  Vector bracket = tuning.F2[L] * Wa - tuning.F1[L] * signals[L].etabar.dot(Wv);
  bracket.noalias() += 0.25 * (sh.E[L] * Wa) * signals[L].mu.dot(Wv);
  return -tuning.theta[L] * bracket;
}

}  // namespace hadp
