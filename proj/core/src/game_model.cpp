#include "hadp/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hadp {

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.cols() == 1) return m.col(0).norm();
  if (m.rows() == 1) return m.row(0).norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace {

void symmetrize(Matrix& a, const std::string& name) {
  require(a.rows() == a.cols(), name + " must be square");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym >= 1e-12) {
    throw ConfigError(name + " must be symmetric (max asymmetry " +
                      std::to_string(asym) + ")");
  }
  a = (0.5 * (a + a.transpose())).eval();
}

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

std::vector<Vector> sample_box(const Box& box, int samples,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = box.dim();
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(samples) + (1u << std::min<int>(d, 10)) + 1);
  points.push_back(0.5 * (box.low + box.high));
  if (d <= 10) {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Vector c(d);
      for (Eigen::Index k = 0; k < d; ++k)
        c(k) = (mask >> k) & 1u ? box.high(k) : box.low(k);
      points.push_back(std::move(c));
    }
  }
  for (int s = 0; s < samples; ++s) {
    Vector x(d);
    for (Eigen::Index k = 0; k < d; ++k)
      x(k) = box.low(k) + unit(rng) * (box.high(k) - box.low(k));
    points.push_back(std::move(x));
  }
  return points;
}

PlayerActions PlayerActions::zeros(const GameSpec& spec) {
  PlayerActions a;
  for (int j = 0; j < spec.followers; ++j) a.u.push_back(Vector::Zero(spec.m[j]));
  a.nu = Vector::Zero(spec.alpha);
  a.omega = Vector::Zero(spec.w);
  return a;
}

void validate_spec(GameSpec& spec, const Box& omega, int samples,
                   std::uint64_t seed) {
  const int N = spec.followers;
  require(spec.n > 0, "n must be positive");
  require(N >= 1, "at least one follower is required");
  require(static_cast<int>(spec.m.size()) == N, "m must list one dimension per follower");
  for (int dim : spec.m) require(dim > 0, "control dimensions must be positive");
  require(spec.alpha > 0, "alpha must be positive");
  require(spec.w > 0, "w must be positive");
  require(spec.gamma2 > 0.0 && std::isfinite(spec.gamma2), "gamma2 must be > 0");
  require(static_cast<int>(spec.R.size()) == N + 1, "R must have N+1 rows of blocks");
  require(static_cast<int>(spec.S.size()) == N + 1, "S must have N+1 entries");
  require(static_cast<int>(spec.Q.size()) == N + 1, "Q must have N+1 entries");
  require(static_cast<int>(spec.vartheta.size()) == N + 1, "vartheta must have N+1 entries");

  for (int i = 0; i <= N; ++i) {
    require(static_cast<int>(spec.R[i].size()) == N, "R row must have N blocks");
    for (int j = 0; j < N; ++j) {
      std::ostringstream name;
      name << "R[" << i + 1 << "][" << j + 1 << "]";
      Matrix& r = spec.R[i][j];
      require(r.rows() == spec.m[j] && r.cols() == spec.m[j],
              name.str() + " must be m_j x m_j");
      symmetrize(r, name.str());
      const double lmin = min_eigenvalue(r);
      if (i == j) {
        require(lmin > 0.0, "R_ii must be positive definite (" + name.str() + ")");
      } else {
        require(lmin >= -1e-12, "R_ij must be positive semidefinite (" + name.str() + ")");
      }
    }
    std::ostringstream name;
    name << "S[" << i + 1 << "]";
    Matrix& s = spec.S[i];
    require(s.rows() == spec.alpha && s.cols() == spec.alpha,
            name.str() + " must be alpha x alpha");
    symmetrize(s, name.str());
    require(min_eigenvalue(s) > 0.0, "S_i must be positive definite (" + name.str() + ")");
    require(spec.vartheta[i] > 0.0, "vartheta_i must be positive");
    require(static_cast<bool>(spec.Q[i]), "Q_i must be callable");
  }

  require(spec.vartheta_radius >= 0.0, "vartheta_radius must be >= 0");
  require(omega.dim() == spec.n, "region dimension must equal n");
  require((omega.high.array() >= omega.low.array()).all(), "region must have low <= high");
  const Vector zero = Vector::Zero(spec.n);
  for (int i = 0; i <= N; ++i) {
    require(std::abs(spec.Q[i](zero)) < 1e-14, "Q_i(0) must be 0");
  }
  for (const Vector& x : sample_box(omega, samples, seed)) {
    const double xx = x.squaredNorm();
    if (std::sqrt(xx) < spec.vartheta_radius) continue;
    for (int i = 0; i <= N; ++i) {
      const double q = spec.Q[i](x);
      if (q < spec.vartheta[i] * xx - 1e-12 * (1.0 + xx)) {
        std::ostringstream msg;
        msg << "Q_i(x) >= vartheta_i x^T x violated for player " << i + 1;
        throw ConfigError(msg.str());
      }
    }
  }
}

void validate_model(const GameSpec& spec, const PlantModel& model) {
  require(static_cast<bool>(model.f) && static_cast<bool>(model.p) &&
              static_cast<bool>(model.h),
          "plant model must define f, p and h");
  require(static_cast<int>(model.g.size()) == spec.followers,
          "plant model must define one g_j per follower");
  const Vector zero = Vector::Zero(spec.n);
  const Vector f0 = model.f(zero);
  require(f0.size() == spec.n, "f must return an n-vector");
  require(f0.cwiseAbs().maxCoeff() == 0.0, "f(0) must be exactly 0");
  for (int j = 0; j < spec.followers; ++j) {
    const Matrix gj = model.g[j](zero);
    require(gj.rows() == spec.n && gj.cols() == spec.m[j], "g_j must be n x m_j");
  }
  const Matrix p0 = model.p(zero);
  require(p0.rows() == spec.n && p0.cols() == spec.alpha, "p must be n x alpha");
  const Matrix h0 = model.h(zero);
  require(h0.rows() == spec.n && h0.cols() == spec.w, "h must be n x w");
}

void check_actions(const GameSpec& spec, const PlayerActions& a) {
  require(static_cast<int>(a.u.size()) == spec.followers, "one control per follower required");
  for (int j = 0; j < spec.followers; ++j)
    require(a.u[j].size() == spec.m[j], "control dimension mismatch");
  require(a.nu.size() == spec.alpha, "leader action dimension mismatch");
  require(a.omega.size() == spec.w, "disturbance dimension mismatch");
}

Vector eval_drift(const PlantModel& model, const Vector& x,
                  const PlayerActions& a) {
  require(a.u.size() == model.g.size(), "control count does not match plant");
  Vector dx = model.f(x);
  require(dx.size() == x.size(), "state dimension mismatch");
  for (std::size_t j = 0; j < model.g.size(); ++j) {
    const Matrix gj = model.g[j](x);
    require(gj.cols() == a.u[j].size(), "control dimension mismatch");
    dx.noalias() += gj * a.u[j];
  }
  const Matrix p = model.p(x);
  require(p.cols() == a.nu.size(), "leader action dimension mismatch");
  dx.noalias() += p * a.nu;
  const Matrix h = model.h(x);
  require(h.cols() == a.omega.size(), "disturbance dimension mismatch");
  dx.noalias() += h * a.omega;
  return dx;
}

double running_cost(const GameSpec& spec, int i, const Vector& x,
                    const PlayerActions& a) {
  require(i >= 0 && i <= spec.followers, "player index out of range");
  check_actions(spec, a);
  double r = spec.Q[i](x);
  for (int j = 0; j < spec.followers; ++j) r += a.u[j].dot(spec.R[i][j] * a.u[j]);
  r += a.nu.dot(spec.S[i] * a.nu);
  r -= spec.gamma2 * a.omega.squaredNorm();
  return r;
}

double hamiltonian(const GameSpec& spec, const PlantModel& model, int i,
                   const Vector& x, const Vector& grad_v,
                   const PlayerActions& a) {
  require(grad_v.size() == spec.n, "gradient dimension must equal n");
  return running_cost(spec, i, x, a) + grad_v.dot(eval_drift(model, x, a));
}

PlantBounds probe_bounds(const PlantModel& model, const Box& region,
                         int samples, std::uint64_t seed) {
  require(samples >= 1, "probe_bounds needs at least one sample");
  require(region.dim() > 0, "empty region");
  require((region.high.array() >= region.low.array()).all(), "empty region");
  PlantBounds b;
  b.g.assign(model.g.size(), 0.0);
  for (const Vector& x : sample_box(region, samples, seed)) {
    for (std::size_t j = 0; j < model.g.size(); ++j)
      b.g[j] = std::max(b.g[j], operator_norm(model.g[j](x)));
    b.p = std::max(b.p, operator_norm(model.p(x)));
    b.h = std::max(b.h, operator_norm(model.h(x)));
  }
  return b;
}

}  // namespace hadp
