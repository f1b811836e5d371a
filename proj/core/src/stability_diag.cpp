#include "hadp/stability_diag.hpp"

#include <algorithm>
#include <cmath>

#include "hadp/leader_strategy.hpp"

namespace hadp {

namespace {

Vector nn_leader_action(const Game& game, const LearnerState& state,
                        const Vector& x) {
  const Vector phi = eval_phi(game.leader_basis, x, Vector());
  return leader_nn_eval(state.Wnu, phi);
}

ClosedLoopPoint point_at(const Game& game, const LearnerState& state,
                         const Vector& x) {
  return evaluate_point(game, state, x, nn_leader_action(game, state, x));
}

}  // namespace

MLayout MLayout::of(const Game& game) {
  const int N = game.spec.followers;
  MLayout l;
  l.size.push_back(game.spec.n);
  for (int i = 0; i <= N; ++i) l.size.push_back(1);
  for (int i = 0; i <= N; ++i) l.size.push_back(game.kappa(i));
  l.size.push_back(game.spec.alpha);
  int at = 0;
  for (int s : l.size) {
    l.offset.push_back(at);
    at += s;
  }
  l.total = at;
  return l;
}

Matrix assemble_M(const Game& game, const TuningParams& tuning,
                  const LearnerState& state, const ClosedLoopPoint& pt) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  const MLayout L = MLayout::of(game);
  const Shorthand& sh = pt.sh;
  Matrix M = Matrix::Zero(L.total, L.total);

  auto critic = [&](int i) { return 1 + i; };
  auto actor = [&](int j) { return N + 2 + j; };
  const int nu_blk = 2 * N + 3;

  // Lower-triangular block (r > c) and its mirror.
  auto put = [&](int r, int c, const Matrix& blk) {
    M.block(L.offset[r], L.offset[c], L.size[r], L.size[c]) = blk;
    M.block(L.offset[c], L.offset[r], L.size[c], L.size[r]) = blk.transpose();
  };

  double vsum = 0.0;
  for (double v : spec.vartheta) vsum += v;
  M.block(0, 0, spec.n, spec.n) = vsum * Matrix::Identity(spec.n, spec.n);
  for (int i = 0; i <= N; ++i) M(L.offset[critic(i)], L.offset[critic(i)]) = 1.0;

  for (int j = 0; j < N; ++j) {
    const Vector& Wvj = state.Wv[j];
    for (int i = 0; i <= N; ++i) {
      const double rho = pt.signals[i].rho;
      Vector col;
      if (i != j) {
        col = sh.C[i][j] * Wvj / (8 * rho) -
              sh.D[i][j].transpose() * state.Wv[i] / (4 * rho);
      } else {
        col = -sh.D[j][j].transpose() * Wvj / (8 * rho) + sh.E[j] * Wvj / 8 -
              0.5 * tuning.F1[j];
      }
      put(actor(j), critic(i), col);
    }
    Matrix bb = Matrix::Zero(game.kappa(j), game.kappa(j));
    for (int l = 0; l <= N; ++l) {
      bb -= 0.25 * sh.C[l][j] * pt.signals[l].mu.dot(state.Wv[l]);
    }
    bb += 0.25 * sh.E[j] * pt.signals[j].mu.dot(Wvj);
    bb += tuning.F2[j] * Matrix::Identity(game.kappa(j), game.kappa(j));
    M.block(L.offset[actor(j)], L.offset[actor(j)], L.size[actor(j)],
            L.size[actor(j)]) = bb;
  }

  const Vector& WvL = state.Wv[N];
  put(actor(N), critic(N), sh.E[N] * WvL / 8 - 0.5 * tuning.F1[N]);
  const int kL = game.kappa(N);
  M.block(L.offset[actor(N)], L.offset[actor(N)], kL, kL) =
      0.25 * sh.E[N] * pt.signals[N].mu.dot(WvL) +
      tuning.F2[N] * Matrix::Identity(kL, kL);

  const Vector phi_nu = eval_phi(game.leader_basis, pt.x, Vector());
  const Vector nu_nn = leader_nn_eval(state.Wnu, phi_nu);
  for (int i = 0; i <= N; ++i) {
    const double rho = pt.signals[i].rho;
    const Matrix row = (state.Wv[i].transpose() * pt.basis[i].grad_x * pt.plant.p) / (2 * rho) +
                       (nu_nn.transpose() * spec.S[i]) / rho;
    put(nu_blk, critic(i), row.transpose());
  }

  return 0.5 * (M + M.transpose());
}

Matrix assemble_M(const Game& game, const TuningParams& tuning,
                  const LearnerState& state, const Vector& x) {
  return assemble_M(game, tuning, state, point_at(game, state, x));
}

Vector assemble_Lambda(const Game& game, const TuningParams& tuning,
                       const LearnerState& state, const ClosedLoopPoint& pt) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  const MLayout L = MLayout::of(game);
  const Shorthand& sh = pt.sh;
  Vector lam = Vector::Zero(L.total);

  for (int i = 0; i <= N; ++i)
    lam(L.offset[1 + i]) = pt.residual[i] / pt.signals[i].rho;

  for (int j = 0; j < N; ++j) {
    const Vector& W = state.Wv[j];
    const auto& sj = pt.signals[j];
    Vector b = -0.5 * sh.E[j] * W + tuning.F2[j] * W +
               0.25 * sh.E[j] * W * sj.mu.dot(W) - tuning.F1[j] * sj.etabar.dot(W);
    for (int l = 0; l <= N; ++l) {
      b += 0.5 * sh.D[l][j].transpose() * state.Wv[l];
      b -= 0.25 * sh.C[l][j] * W * pt.signals[l].mu.dot(state.Wv[l]);
    }
    lam.segment(L.offset[N + 2 + j], L.size[N + 2 + j]) = b;
  }

  const Vector& W = state.Wv[N];
  const auto& sL = pt.signals[N];
  lam.segment(L.offset[2 * N + 2], L.size[2 * N + 2]) =
      -0.5 * sh.E[N] * W + tuning.F2[N] * W + 0.25 * sh.E[N] * W * sL.mu.dot(W) -
      tuning.F1[N] * sL.etabar.dot(W);

  Vector last = Vector::Zero(spec.alpha);
  for (int l = 0; l <= N; ++l)
    last -= pt.plant.p.transpose() * pt.basis[l].grad_x.transpose() * state.Wv[l];
  lam.segment(L.offset[2 * N + 3], spec.alpha) = last;
  return lam;
}

double upsilon(const Game& game, const LearnerState& state,
               const ClosedLoopPoint& pt) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  const Vector nu = nn_leader_action(game, state, pt.x);
  double total = 0.0;
  for (int i = 0; i <= N; ++i) {
    double v = std::abs(pt.residual[i]);
    for (int j = 0; j < N; ++j) v -= 0.25 * state.Wv[j].dot(pt.sh.C[i][j] * state.Wv[j]);
    v += 0.25 * state.Wv[i].dot(pt.sh.E[i] * state.Wv[i]);
    v -= nu.dot(spec.S[i] * nu);
    total += v;
  }
  return total;
}

double stacked_S_norm(const GameSpec& spec) {
  Matrix stacked(spec.alpha * static_cast<Eigen::Index>(spec.S.size()), spec.alpha);
  for (std::size_t i = 0; i < spec.S.size(); ++i)
    stacked.block(static_cast<Eigen::Index>(i) * spec.alpha, 0, spec.alpha, spec.alpha) = spec.S[i];
  return operator_norm(stacked);
}

UubWindow uub_window(double lambda_m, double Lambda_m, double Upsilon_m,
                     double S_m) {
  UubWindow w;
  w.pd = lambda_m > 0.0;
  w.radicand = lambda_m * lambda_m - 1.54 * std::sqrt(2.0) * S_m * Lambda_m;
  if (!w.pd || !(S_m > 0.0)) return w;
  w.radicand_ok = w.radicand >= 0.0;
  if (w.radicand_ok) {
    const double root = std::sqrt(w.radicand);
    w.r1 = (lambda_m - root) / (0.77 * S_m);
    w.r2 = (lambda_m + root) / (0.77 * S_m);
  }
  w.ub_threshold = Lambda_m / lambda_m +
                   std::sqrt(std::max(0.0, Upsilon_m / lambda_m +
                                               Lambda_m * Lambda_m / (2 * lambda_m * lambda_m)));
  return w;
}

ProofBounds sample_proof_bounds(const Game& game, const TuningParams& tuning,
                                const LearnerState& state, const Box& region,
                                int samples, std::uint64_t seed) {
  require(samples >= 1, "sample_proof_bounds needs at least one sample");
  ProofBounds b;
  b.S_m = stacked_S_norm(game.spec);
  bool first = true;
  for (const Vector& x : sample_box(region, samples, seed)) {
    const ClosedLoopPoint pt = point_at(game, state, x);
    const Matrix M = assemble_M(game, tuning, state, pt);
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double Lam = assemble_Lambda(game, tuning, state, pt).norm();
    const double ups = upsilon(game, state, pt);
    if (first) {
      b.lambda_m = lmin;
      b.Lambda_m = Lam;
      b.Upsilon_m = ups;
      first = false;
    } else {
      b.lambda_m = std::min(b.lambda_m, lmin);
      b.Lambda_m = std::max(b.Lambda_m, Lam);
      b.Upsilon_m = std::max(b.Upsilon_m, ups);
    }
  }
  return b;
}

StabilityReport stability_report(const Game& game, const TuningParams& tuning,
                                 const LearnerState& state, int samples,
                                 std::uint64_t seed) {
  const ProofBounds b = sample_proof_bounds(game, tuning, state, game.region, samples, seed);
  const UubWindow w = uub_window(b.lambda_m, b.Lambda_m, b.Upsilon_m, b.S_m);
  StabilityReport r;
  r.lambda_m = b.lambda_m;
  r.Lambda_m = b.Lambda_m;
  r.Upsilon_m = b.Upsilon_m;
  r.S_m = b.S_m;
  r.r1 = w.r1;
  r.r2 = w.r2;
  r.ub_threshold = w.ub_threshold;
  r.pd = w.pd;
  r.radicand_ok = w.radicand_ok;
  r.samples = samples;
  return r;
}

}  // namespace hadp
