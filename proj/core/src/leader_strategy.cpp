#include "hadp/leader_strategy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hadp {

namespace {

double frobenius(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace

NemytskiiMap::NemytskiiMap(const Game& game, const LearnerState& state,
                           const Vector& x)
    : game_(&game), state_(&state), x_(x), alpha_(game.spec.alpha) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  const int L = spec.leader();
  require(x.size() == spec.n, "state dimension mismatch");

  s_inv_ = spec.S[L].inverse();
  const Vector nu0 = Vector::Zero(alpha_);
  const BasisEval leader_value = eval_all(game.value_bases[L], x, nu0);
  const Matrix p = game.model.p(x);
  const Vector grad_vl = leader_value.grad_x.transpose() * state.Wv[L];
  pi_ = p.transpose() * grad_vl;
  xi_ = -0.5 * s_inv_ * pi_;

  A_.resize(N);
  B_.resize(N);
  for (int j = 0; j < N; ++j) {
    const Matrix gj = game.model.g[j](x);
    const Matrix Rinv = spec.R[j][j].inverse();
    const Matrix G = gj * Rinv * gj.transpose();
    A_[j] = state.Wa[j] * (grad_vl.transpose() * G);
    B_[j] = gj * Rinv * spec.R[L][j] * Rinv * gj.transpose();
  }
}

Vector NemytskiiMap::xi_part(const Vector& nu) const {
  require(nu.size() == alpha_, "leader action dimension mismatch");
  Vector t = Vector::Zero(alpha_);
  for (int j = 0; j < game_->spec.followers; ++j) {
    const PolyBasis& basis = game_->value_bases[j];
    if (!basis.depends_on_nu()) continue;
    const BasisEval bj = eval_all(basis, x_, nu);
    const Vector& wa = state_->Wa[j];
    const Matrix m = A_[j] - wa * ((wa.transpose() * bj.grad_x) * B_[j]);
    for (int a = 0; a < alpha_; ++a) t(a) += frobenius(bj.dgrad_dnu[a], m);
  }
  return 0.25 * s_inv_ * t;
}

Matrix NemytskiiMap::jacobian(const Vector& nu) const {
  require(nu.size() == alpha_, "leader action dimension mismatch");
  Matrix dt = Matrix::Zero(alpha_, alpha_);
  for (int j = 0; j < game_->spec.followers; ++j) {
    const PolyBasis& basis = game_->value_bases[j];
    if (!basis.depends_on_nu()) continue;
    const BasisEval bj = eval_all(basis, x_, nu);
    const Vector& wa = state_->Wa[j];
    const Matrix m = A_[j] - wa * ((wa.transpose() * bj.grad_x) * B_[j]);
    for (int b = 0; b < alpha_; ++b) {
      const Matrix dm = -wa * ((wa.transpose() * bj.dgrad_dnu[b]) * B_[j]);
      for (int a = 0; a < alpha_; ++a) {
        dt(a, b) += frobenius(bj.d2(a, b), m) + frobenius(bj.dgrad_dnu[a], dm);
      }
    }
  }
  return 0.25 * s_inv_ * dt;
}

LeaderMap NemytskiiMap::as_function() const {
  return [this](const Vector& nu) { return (*this)(nu); };
}

Vector nemytskii_rhs(const NemytskiiMap& map, const Vector& nu) { return map(nu); }

FixedPointReport fixed_point_solve(const LeaderMap& map, const Vector& nu0,
                                   double tol, int max_iter) {
  require(tol > 0.0, "fixed-point tolerance must be positive");
  require(max_iter >= 1, "max_iter must be >= 1");
  FixedPointReport r;
  Vector nu = nu0;
  double prev_step = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    Vector next = map(nu);
    const double step = (next - nu).norm();
    if (k > 1 && prev_step > 0.0) r.contraction_estimate = step / prev_step;
    prev_step = step;
    nu = std::move(next);
    r.iterations = k;
    r.final_step = step;
    if (!std::isfinite(step)) break;
    if (step <= tol) {
      r.converged = true;
      break;
    }
  }
  r.nu_star = std::move(nu);
  return r;
}

double lipschitz_estimate(const LeaderMap& map, const Box& region, int samples,
                          std::uint64_t seed) {
  require(samples >= 2, "lipschitz_estimate needs at least two samples");
  require(region.dim() > 0, "degenerate region");
  require((region.high.array() > region.low.array()).all(),
          "degenerate region (zero volume)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&]() {
    Vector v(region.dim());
    for (Eigen::Index k = 0; k < v.size(); ++k)
      v(k) = region.low(k) + unit(rng) * (region.high(k) - region.low(k));
    return v;
  };
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector a = draw();
    const Vector b = draw();
    const double d = (a - b).norm();
    if (d <= 0.0) continue;
    best = std::max(best, (map(a) - map(b)).norm() / d);
  }
  return best;
}

Vector leader_nn_eval(const Matrix& Wnu, const Vector& phi_nu) {
  require(Wnu.rows() == phi_nu.size(), "leader NN shape mismatch");
  return Wnu.transpose() * phi_nu;
}

std::vector<Matrix> leader_output_gradient(const Vector& phi_nu, int alpha) {
  std::vector<Matrix> slices(alpha, Matrix::Zero(phi_nu.size(), alpha));
  for (int c = 0; c < alpha; ++c) slices[c].col(c) = phi_nu;
  return slices;
}

Vector e_nu_residual(const Game& game, const LearnerState& state,
                     const NemytskiiMap& map) {
  const Vector phi = eval_phi(game.leader_basis, map.x(), Vector());
  const Vector nu = leader_nn_eval(state.Wnu, phi);
  return nu - map(nu);
}

Matrix w_nu_rate(const Game& game, const LearnerState& state,
                 const NemytskiiMap& map, double varrho, WnuMode mode,
                 double fd_step) {
  const Vector phi = eval_phi(game.leader_basis, map.x(), Vector());
  const int alpha = game.spec.alpha;
  const int mu = game.mu();

  if (mode == WnuMode::kAnalytic) {
    const Vector nu = leader_nn_eval(state.Wnu, phi);
    const Vector e = nu - map(nu);
    const Matrix I = Matrix::Identity(alpha, alpha);
    const Vector back = 2.0 * (I - map.jacobian(nu)).transpose() * e;
    const std::vector<Matrix> dnu = leader_output_gradient(phi, alpha);
    Matrix grad = Matrix::Zero(mu, alpha);
    for (int c = 0; c < alpha; ++c) grad += back(c) * dnu[c];
    return -varrho * grad;
  }

  require(fd_step > 0.0, "finite-difference step must be positive");
  auto objective = [&](const Matrix& W) {
    const Vector nu = leader_nn_eval(W, phi);
    return (nu - map(nu)).squaredNorm();
  };
  Matrix grad(mu, alpha);
  Matrix W = state.Wnu;
  for (int r = 0; r < mu; ++r) {
    for (int c = 0; c < alpha; ++c) {
      const double saved = W(r, c);
      W(r, c) = saved + fd_step;
      const double up = objective(W);
      W(r, c) = saved - fd_step;
      const double down = objective(W);
      W(r, c) = saved;
      grad(r, c) = (up - down) / (2.0 * fd_step);
    }
  }
  return -varrho * grad;
}

}  // namespace hadp
