#include "hadp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "hadp/stability_diag.hpp"

namespace hadp {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = uniform(rng, -scale, scale);
  return m;
}

Vector random_vector(Rng& rng, int n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

/// Symmetric positive definite with eigenvalues >= floor.
Matrix random_spd(Rng& rng, int n, double floor) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + floor * Matrix::Identity(n, n);
}

Monomial unit_term(int vars, std::initializer_list<int> idx) {
  Monomial m(static_cast<std::size_t>(vars), 0);
  for (int i : idx) m[static_cast<std::size_t>(i)] += 1;
  return m;
}

/// x-quadratics, plus (for followers) mixed x*nu and x*nu^2 terms.
std::vector<Monomial> random_value_terms(Rng& rng, int n, int alpha, bool with_nu) {
  const int vars = n + alpha;
  std::set<Monomial> terms;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) terms.insert(unit_term(vars, {a, b}));
  if (pick(rng, 0, 1)) terms.insert(unit_term(vars, {0, 0, 0, 0}));
  if (with_nu) {
    for (int c = 0; c < alpha; ++c) {
      terms.insert(unit_term(vars, {pick(rng, 0, n - 1), n + c}));
      terms.insert(unit_term(vars, {pick(rng, 0, n - 1), n + c, n + c}));
    }
    if (alpha > 1) terms.insert(unit_term(vars, {pick(rng, 0, n - 1), n, n + 1}));
  }
  return {terms.begin(), terms.end()};
}

std::vector<Monomial> random_nn_terms(Rng& rng, int n) {
  std::set<Monomial> terms;
  for (int a = 0; a < n; ++a) terms.insert(unit_term(n, {a}));
  terms.insert(unit_term(n, {pick(rng, 0, n - 1), pick(rng, 0, n - 1)}));
  return {terms.begin(), terms.end()};
}

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

CheckResult finish(CheckResult r) {
  r.passed = std::isfinite(r.max_error) && r.max_error < r.tolerance;
  return r;
}

Vector default_control(const GameSpec& spec, int i, const BasisEval& basis,
                       const Vector& Wa, const Matrix& g) {
  return follower_control(spec, i, basis, Wa, g);
}

Vector gradient_of_value(const BasisEval& basis, const Vector& W) {
  return basis.grad_x.transpose() * W;
}

}  // namespace

Game random_game(std::uint64_t seed, const RandomGameOptions& opts) {
  Rng rng(seed);
  Game g;
  GameSpec& s = g.spec;
  s.n = pick(rng, 2, std::max(2, opts.max_n));
  s.followers = pick(rng, 1, std::max(1, opts.max_followers));
  s.alpha = opts.scalar_leader ? 1 : pick(rng, 1, std::max(1, opts.max_alpha));
  s.w = pick(rng, 1, std::max(1, opts.max_w));
  for (int j = 0; j < s.followers; ++j) s.m.push_back(pick(rng, 1, std::max(1, opts.max_m)));
  s.gamma2 = uniform(rng, 0.5, 2.0);
  const int N = s.followers;
  s.R.assign(N + 1, std::vector<Matrix>(N));
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j < N; ++j) {
      s.R[i][j] = i == j ? random_spd(rng, s.m[j], 0.5)
                         : Matrix(random_spd(rng, s.m[j], 0.0) * uniform(rng, 0.0, 1.0));
    }
    s.S.push_back(random_spd(rng, s.alpha, 1.0));
    const Matrix P = random_spd(rng, s.n, 0.5);
    Eigen::SelfAdjointEigenSolver<Matrix> es(P, Eigen::EigenvaluesOnly);
    s.vartheta.push_back(0.99 * es.eigenvalues()(0));
    s.Q.push_back([P](const Vector& x) { return x.dot(P * x); });
  }

  const int n = s.n;
  const Matrix A = random_matrix(rng, n, n);
  const Vector c = random_vector(rng, n, 0.5);
  g.model.f = [A, c](const Vector& x) {
    return Vector(A * x + c.cwiseProduct(x.array().sin().matrix()));
  };
  for (int j = 0; j < N; ++j) {
    const Matrix G0 = random_matrix(rng, n, s.m[j]);
    const Matrix G1 = random_matrix(rng, n, s.m[j], 0.3);
    g.model.g.push_back([G0, G1](const Vector& x) { return Matrix(G0 + G1 * std::cos(x(0))); });
  }
  const Matrix P0 = random_matrix(rng, n, s.alpha);
  const Matrix P1 = random_matrix(rng, n, s.alpha, 0.3);
  g.model.p = [P0, P1](const Vector& x) { return Matrix(P0 + P1 * std::sin(x(0) * x(0))); };
  const Matrix H0 = random_matrix(rng, n, s.w);
  const Matrix H1 = random_matrix(rng, n, s.w, 0.3);
  g.model.h = [H0, H1](const Vector& x) {
    return Matrix(H0 + H1 * std::cos(x(x.size() - 1)));
  };

  for (int i = 0; i < N; ++i)
    g.value_bases.emplace_back(n, s.alpha, random_value_terms(rng, n, s.alpha, true));
  g.value_bases.emplace_back(n, s.alpha, random_value_terms(rng, n, s.alpha, false));
  g.leader_basis = PolyBasis(n, 0, random_nn_terms(rng, n));
  g.region = Box{Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)};
  validate_game(g);
  return g;
}

TuningParams random_tuning(const Game& game, std::uint64_t seed) {
  Rng rng(seed);
  TuningParams t;
  for (int i = 0; i < game.players(); ++i) {
    t.tau.push_back(uniform(rng, 0.2, 2.0));
    t.theta.push_back(uniform(rng, 0.2, 2.0));
    t.F1.push_back(random_vector(rng, game.kappa(i), 1.0).cwiseAbs() * 10.0);
    t.F2.push_back(uniform(rng, 5.0, 50.0));
  }
  t.varrho = uniform(rng, 0.2, 2.0);
  return t;
}

LearnerState random_weights(const Game& game, std::uint64_t seed, double scale) {
  Rng rng(seed);
  LearnerState s = LearnerState::zeros(game);
  for (int i = 0; i < game.players(); ++i) {
    s.Wv[i] = random_vector(rng, game.kappa(i), scale);
    s.Wa[i] = random_vector(rng, game.kappa(i), scale);
  }
  s.Wnu = random_matrix(rng, game.mu(), game.spec.alpha, scale);
  return s;
}

Vector random_point(const Box& box, std::uint64_t seed) {
  Rng rng(seed);
  Vector x(box.dim());
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = uniform(rng, box.low(k), box.high(k));
  return x;
}

CheckResult check_basis_fd(const VerifyOptions& opts) {
  CheckResult r{"basis derivatives vs central differences", 0.0, 1e-6, false, ""};
  int evaluated = 0;
  for (int gi = 0; gi < opts.games; ++gi) {
    const Game game = random_game(opts.seed + 101 * gi);
    Rng rng(opts.seed + 7 * gi);
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_vector(rng, game.spec.n);
      const Vector nu = random_vector(rng, game.spec.alpha);
      for (const PolyBasis& b : game.value_bases) {
        r.max_error = std::max(r.max_error, fd_validate(b, x, nu, 1e-5));
        ++evaluated;
      }
      r.max_error = std::max(r.max_error, fd_validate(game.leader_basis, x, Vector(), 1e-5));
    }
  }
  r.detail = std::to_string(evaluated) + " basis evaluations";
  return finish(r);
}

CheckResult check_stationarity(const VerifyOptions& opts) {
  CheckResult r{"Hamiltonian stationarity at u_hat and omega_hat", 0.0, 1e-6, false, ""};
  const ControlFn control = opts.control ? opts.control : ControlFn(default_control);
  int evaluated = 0;
  for (int gi = 0; gi < opts.games; ++gi) {
    const Game game = random_game(opts.seed + 211 * gi);
    const GameSpec& spec = game.spec;
    const int N = spec.followers;
    Rng rng(opts.seed + 13 * gi);
    for (int k = 0; k < opts.points; ++k) {
      const Vector x = random_point(game.region, rng());
      const Vector nu = random_vector(rng, spec.alpha);
      const LearnerState w = random_weights(game, rng());
      const PlantEval plant = PlantEval::at(game.model, x);
      PlayerActions base = PlayerActions::zeros(spec);
      for (int j = 0; j < N; ++j) base.u[j] = random_vector(rng, spec.m[j]);
      base.nu = nu;
      base.omega = random_vector(rng, spec.w);

      for (int i = 0; i <= N; ++i) {
        const BasisEval be = eval_all(game.value_bases[i], x, nu);
        const Vector gradV = gradient_of_value(be, w.Wa[i]);
        auto H = [&](const PlayerActions& a) {
          return hamiltonian(spec, game.model, i, x, gradV, a);
        };
        // which < 0 differentiates omega, otherwise u_which.
        auto fd_norm = [&](PlayerActions a, int which) {
          Vector& v = which < 0 ? a.omega : a.u[static_cast<std::size_t>(which)];
          Vector grad(v.size());
          for (Eigen::Index c = 0; c < v.size(); ++c) {
            const double h = 1e-5 * std::max(1.0, std::abs(v(c)));
            const double saved = v(c);
            v(c) = saved + h;
            const double up = H(a);
            v(c) = saved - h;
            const double down = H(a);
            v(c) = saved;
            grad(c) = (up - down) / (2 * h);
          }
          return grad.norm();
        };

        if (i < N) {
          PlayerActions a = base;
          a.u[i] = control(spec, i, be, w.Wa[i], plant.g[i]);
          const double scale = (plant.g[i].transpose() * gradV).norm() +
                               (2.0 * spec.R[i][i] * a.u[i]).norm();
          r.max_error = std::max(r.max_error, rel(fd_norm(a, i), scale));
          ++evaluated;
        }
        PlayerActions a = base;
        a.omega = player_disturbance(spec, be, w.Wa[i], plant.h);
        const double scale = (plant.h.transpose() * gradV).norm() +
                             (2.0 * spec.gamma2 * a.omega).norm();
        r.max_error = std::max(r.max_error, rel(fd_norm(a, -1), scale));
        ++evaluated;
      }
    }
  }
  r.detail = std::to_string(evaluated) + " gradients over " + std::to_string(opts.games) +
             " games";
  return finish(r);
}

CheckResult check_residual_identity(const VerifyOptions& opts, int samples) {
  CheckResult r{"HJB residual: shorthand form vs eta form", 0.0, 1e-10, false, ""};
  std::vector<Game> games;
  for (int gi = 0; gi < opts.games; ++gi) games.push_back(random_game(opts.seed + 307 * gi));
  Rng rng(opts.seed + 17);
  for (int k = 0; k < samples; ++k) {
    const Game& game = games[static_cast<std::size_t>(k) % games.size()];
    const Vector x = random_point(game.region, rng());
    const Vector nu = random_vector(rng, game.spec.alpha);
    const LearnerState w = random_weights(game, rng());
    for (int i = 0; i < game.players(); ++i) {
      const double a = hjb_residual(game, i, w, x, nu);
      const double b = hjb_residual_eta_form(game, i, w, x, nu);
      r.max_error = std::max(r.max_error, std::abs(a - b) / (1.0 + std::abs(a)));
    }
  }
  r.detail = std::to_string(samples) + " random (x, weights) samples";
  return finish(r);
}

CheckResult check_critic_gradient(const VerifyOptions& opts) {
  CheckResult r{"critic rate vs -tau d(e^2)/dWv / (2 rho^2)", 0.0, 1e-6, false, ""};
  for (int gi = 0; gi < opts.games; ++gi) {
    const Game game = random_game(opts.seed + 401 * gi);
    const TuningParams tuning = random_tuning(game, opts.seed + gi);
    Rng rng(opts.seed + 19 * gi);
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_point(game.region, rng());
      const Vector nu = random_vector(rng, game.spec.alpha);
      LearnerState w = random_weights(game, rng());
      const ClosedLoopPoint pt = evaluate_point(game, w, x, nu);
      for (int i = 0; i < game.players(); ++i) {
        const NormalizedSignals& sig = pt.signals[i];
        const Vector rate = critic_rate(tuning, i, sig, pt.residual[i]);
        Vector grad(game.kappa(i));
        for (int c = 0; c < game.kappa(i); ++c) {
          const double h = 1e-4;
          const double saved = w.Wv[i](c);
          w.Wv[i](c) = saved + h;
          const double up = std::pow(hjb_residual_eta_form(game, i, w, x, nu), 2);
          w.Wv[i](c) = saved - h;
          const double down = std::pow(hjb_residual_eta_form(game, i, w, x, nu), 2);
          w.Wv[i](c) = saved;
          grad(c) = (up - down) / (2 * h);
        }
        const Vector expected = -tuning.tau[i] * grad / (2 * sig.rho * sig.rho);
        r.max_error = std::max(r.max_error,
                               rel((rate - expected).norm(), std::max(rate.norm(), 1e-12)));
      }
    }
  }
  return finish(r);
}

CheckResult check_wnu_fd_order(const VerifyOptions& opts) {
  CheckResult r{"numeric w_nu rate: central-difference order", 0.0, 0.3, false, ""};
  RandomGameOptions go;
  go.scalar_leader = true;
  std::vector<double> orders;
  for (int gi = 0; gi < opts.games; ++gi) {
    const Game game = random_game(opts.seed + 503 * gi, go);
    const LearnerState w = random_weights(game, opts.seed + 3 * gi);
    const Vector x = random_point(game.region, opts.seed + 5 * gi);
    const NemytskiiMap map(game, w, x);
    const Matrix exact = w_nu_rate(game, w, map, 1.0, WnuMode::kAnalytic);
    const double hs[] = {0.2, 0.1, 0.05};
    double err[3];
    for (int k = 0; k < 3; ++k)
      err[k] = (w_nu_rate(game, w, map, 1.0, WnuMode::kNumeric, hs[k]) - exact).norm();
    // Instances whose objective is quadratic in Wnu are differenced exactly.
    if (err[0] < 1e-9 * std::max(1.0, exact.norm())) continue;
    orders.push_back(std::log2(err[0] / err[1]));
    orders.push_back(std::log2(err[1] / err[2]));
  }
  if (orders.empty()) {
    r.max_error = std::numeric_limits<double>::infinity();
    r.detail = "no instance with a non-quadratic objective";
    return finish(r);
  }
  std::sort(orders.begin(), orders.end());
  const double median = orders[orders.size() / 2];
  r.max_error = std::abs(median - 2.0);
  std::ostringstream d;
  d << "median order " << median << " over " << orders.size() << " step pairs";
  r.detail = d.str();
  return finish(r);
}

CheckResult check_wnu_analytic(const VerifyOptions& opts) {
  CheckResult r{"analytic w_nu rate vs numeric (alpha = 1)", 0.0, 1e-4, false, ""};
  RandomGameOptions go;
  go.scalar_leader = true;
  double multi = 0.0;
  for (int gi = 0; gi < opts.games; ++gi) {
    for (int pass = 0; pass < 2; ++pass) {
      const Game game = pass == 0 ? random_game(opts.seed + 601 * gi, go)
                                  : random_game(opts.seed + 601 * gi);
      Rng rng(opts.seed + 23 * gi + pass);
      for (int k = 0; k < 10; ++k) {
        const LearnerState w = random_weights(game, rng());
        const Vector x = random_point(game.region, rng());
        const NemytskiiMap map(game, w, x);
        const Matrix a = w_nu_rate(game, w, map, 1.0, WnuMode::kAnalytic);
        const Matrix n = w_nu_rate(game, w, map, 1.0, WnuMode::kNumeric);
        const double e = rel((a - n).norm(), std::max(n.norm(), 1e-8));
        if (game.spec.alpha == 1) {
          r.max_error = std::max(r.max_error, e);
        } else {
          multi = std::max(multi, e);
        }
      }
    }
  }
  std::ostringstream d;
  d << "alpha > 1 instances: max relative error " << multi;
  r.detail = d.str();
  return finish(r);
}

CheckResult check_fixed_point(const VerifyOptions& opts) {
  CheckResult r{"Picard solve of affine contractions", 0.0, 1e-10, false, ""};
  Rng rng(opts.seed + 29);
  for (int k = 0; k < 50; ++k) {
    const int alpha = pick(rng, 1, 3);
    Matrix A = random_matrix(rng, alpha, alpha);
    A *= uniform(rng, 0.1, 0.9) / operator_norm(A);
    const Vector b = random_vector(rng, alpha, 2.0);
    const Vector star = (Matrix::Identity(alpha, alpha) - A).partialPivLu().solve(b);
    const LeaderMap map = [A, b](const Vector& nu) { return Vector(A * nu + b); };
    const FixedPointReport rep = fixed_point_solve(map, Vector::Zero(alpha), 1e-14, 2000);
    double e = (rep.nu_star - star).norm();
    if (!rep.converged) e = std::max(e, 1.0);
    r.max_error = std::max(r.max_error, e);
  }
  return finish(r);
}

CheckResult check_lipschitz(const VerifyOptions& opts) {
  CheckResult r{"Lipschitz estimate of known linear maps", 0.0, 0.1, false, ""};
  Rng rng(opts.seed + 31);
  for (int k = 0; k < 20; ++k) {
    const int alpha = pick(rng, 1, 3);
    const Matrix A = random_matrix(rng, alpha, alpha, 2.0);
    const Vector b = random_vector(rng, alpha);
    const LeaderMap map = [A, b](const Vector& nu) { return Vector(A * nu + b); };
    const Box box{Vector::Constant(alpha, -1.0), Vector::Constant(alpha, 1.0)};
    const double L = lipschitz_estimate(map, box, 4000, rng());
    r.max_error = std::max(r.max_error, std::abs(L - operator_norm(A)) / operator_norm(A));
  }
  return finish(r);
}

CheckResult check_non_contractive(const VerifyOptions& opts) {
  CheckResult r{"non-contractive maps are flagged", 0.0, 0.5, false, ""};
  (void)opts;
  int missed = 0;
  const std::vector<LeaderMap> maps = {
      [](const Vector& nu) { return Vector(2.0 * nu + Vector::Ones(nu.size())); },
      [](const Vector& nu) {
        Matrix A(2, 2);
        A << 0.0, -1.5, 1.5, 0.0;
        return Vector(A * nu + Vector::Ones(2));
      },
      [](const Vector& nu) { return Vector(-1.2 * nu + Vector::Constant(nu.size(), 0.3)); }};
  const int dims[] = {1, 2, 3};
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const FixedPointReport rep =
        fixed_point_solve(maps[k], Vector::Zero(dims[k]), 1e-10, 200);
    if (rep.converged || rep.contraction_estimate <= 1.0) ++missed;
  }
  r.max_error = missed;
  r.detail = std::to_string(missed) + " of " + std::to_string(maps.size()) + " missed";
  return finish(r);
}

std::vector<double> integrator_orders(const std::vector<double>& dts, double t_end) {
  Matrix A(2, 2);
  A << 0.0, 1.0, -2.0, -3.0;
  ModelDefaults d = linear_test(A);
  validate_game(d.game);
  // Small nonzero weights so every learning term is active.
  LearnerState w0 = random_weights(d.game, 99, 0.2);
  std::vector<Vector> finals;
  for (double dt : dts) {
    JointState s{d.sim.x0, w0};
    const int steps = static_cast<int>(std::lround(t_end / dt));
    const StepForcing forcing = StepForcing::zeros(d.game.spec);
    for (int k = 0; k < steps; ++k)
      s = step(d.game, d.tuning, d.sim.leader, s, k * dt, dt, forcing, true);
    std::vector<double> flat(s.x.data(), s.x.data() + s.x.size());
    for (const Vector& v : s.w.Wv) flat.insert(flat.end(), v.data(), v.data() + v.size());
    for (const Vector& v : s.w.Wa) flat.insert(flat.end(), v.data(), v.data() + v.size());
    flat.insert(flat.end(), s.w.Wnu.data(), s.w.Wnu.data() + s.w.Wnu.size());
    finals.push_back(Eigen::Map<Vector>(flat.data(), static_cast<Eigen::Index>(flat.size())));
  }
  std::vector<double> orders;
  for (std::size_t k = 0; k + 2 < finals.size(); ++k) {
    const double e0 = (finals[k] - finals[k + 1]).norm();
    const double e1 = (finals[k + 1] - finals[k + 2]).norm();
    orders.push_back(std::log2(e0 / e1));
  }
  return orders;
}

CheckResult check_integrator_order(const VerifyOptions& opts) {
  (void)opts;
  CheckResult r{"RK4 order on the linear test plant", 0.0, 1e-12, false, ""};
  const std::vector<double> orders = integrator_orders({0.1, 0.05, 0.025, 0.0125}, 2.0);
  std::ostringstream d;
  d << "orders";
  for (double o : orders) {
    d << ' ' << std::setprecision(4) << o;
    const double outside = o < 3.7 ? 3.7 - o : (o > 4.3 ? o - 4.3 : 0.0);
    r.max_error = std::max(r.max_error, std::isfinite(o) ? outside : 1e300);
  }
  r.detail = d.str() + " (accepted range [3.7, 4.3])";
  return finish(r);
}

CheckResult check_m_matrix(const VerifyOptions& opts) {
  CheckResult r{"M matrix: symmetry, m11, eigen oracle, UUB identities", 0.0, 1e-8, false, ""};
  ModelDefaults d = paper_sec5();
  validate_game(d.game);
  double vsum = 0.0;
  for (double v : d.game.spec.vartheta) vsum += v;
  Rng rng(opts.seed + 37);
  for (int k = 0; k < 20; ++k) {
    const LearnerState w = random_weights(d.game, rng());
    const Vector x = random_point(d.game.region, rng());
    const Matrix M = assemble_M(d.game, d.tuning, w, x);
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    const double m11 = (M.topLeftCorner(2, 2) - vsum * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Matrix> sym(M, Eigen::EigenvaluesOnly);
    Eigen::EigenSolver<Matrix> general(M, false);
    const double oracle = general.eigenvalues().real().minCoeff();
    const double lam = sym.eigenvalues()(0);
    r.max_error = std::max({r.max_error, asym, m11,
                            std::abs(lam - oracle) / std::max(1.0, std::abs(oracle))});
  }
  for (int k = 0; k < 50; ++k) {
    const double lam = uniform(rng, 0.1, 10.0);
    const double S = uniform(rng, 0.1, 10.0);
    const double Lam = uniform(rng, 0.0, lam * lam / (1.54 * std::sqrt(2.0) * S));
    const UubWindow wdw = uub_window(lam, Lam, uniform(rng, 0.0, 5.0), S);
    if (!wdw.r1 || !wdw.r2) {
      r.max_error = 1e300;
      continue;
    }
    const double expect = 2 * lam / (0.77 * S);
    r.max_error = std::max(r.max_error, std::abs(*wdw.r1 + *wdw.r2 - expect) / expect);
  }
  const StabilityReport rep =
      stability_report(d.game, d.tuning, initial_weights(d.game, d.sim.init), 64, opts.seed);
  const bool consistent = rep.pd == (rep.lambda_m > 0.0) &&
                          (!rep.radicand_ok || (rep.r1 && rep.r2 && *rep.r1 <= *rep.r2)) &&
                          (rep.pd || (!rep.r1 && !rep.r2 && !rep.ub_threshold));
  if (!consistent) r.max_error = 1e300;
  std::ostringstream s;
  s << "sec5 report: lambda_m=" << rep.lambda_m << " pd=" << rep.pd
    << " radicand_ok=" << rep.radicand_ok;
  r.detail = s.str();
  return finish(r);
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport cmd_verify(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.checks.push_back(check_basis_fd(opts));
  rep.checks.push_back(check_stationarity(opts));
  rep.checks.push_back(check_residual_identity(opts));
  rep.checks.push_back(check_critic_gradient(opts));
  rep.checks.push_back(check_wnu_fd_order(opts));
  rep.checks.push_back(check_wnu_analytic(opts));
  rep.checks.push_back(check_fixed_point(opts));
  rep.checks.push_back(check_lipschitz(opts));
  rep.checks.push_back(check_non_contractive(opts));
  rep.checks.push_back(check_integrator_order(opts));
  rep.checks.push_back(check_m_matrix(opts));
  return rep;
}

std::string format_report(const VerifyReport& report) {
  std::ostringstream out;
  for (const CheckResult& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  max_error=" << std::setprecision(3)
        << c.max_error << " tol=" << c.tolerance;
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << '\n';
  }
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                    [](const CheckResult& c) { return !c.passed; });
  out << (failed ? std::to_string(failed) + " check(s) failed" : "all checks passed") << '\n';
  return out.str();
}

}  // namespace hadp
