#include "hadp/builtin_models.hpp"

#include <cmath>

namespace hadp {

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix column(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

}  // namespace

std::vector<Monomial> builtin_basis_terms(const std::string& name) {
  // exponents over (x1, x2, nu) for value bases, (x1, x2) for the leader NN
  if (name == "paper-sec5-follower") {
    return {{2, 0, 0}, {0, 2, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
  }
  if (name == "paper-sec5-leader") {
    return {{2, 0, 0}, {0, 2, 0}, {4, 0, 0}, {0, 4, 0}, {2, 2, 0}};
  }
  if (name == "paper-sec5-nu") {
    return {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
  }
  throw ConfigError("unknown basis name '" + name + "'");
}

ModelDefaults paper_sec5() {
  ModelDefaults d;
  Game& g = d.game;
  GameSpec& s = g.spec;
  s.n = 2;
  s.followers = 2;
  s.m = {1, 1};
  s.alpha = 1;
  s.w = 1;
  s.gamma2 = 0.6;
  s.R = {{scalar(4), scalar(1)}, {scalar(1), scalar(2)}, {scalar(1), scalar(1)}};
  s.S = {scalar(4), scalar(2), scalar(20)};
  s.Q = {
      [](const Vector& x) { return 2 * x(0) * x(0) + x(1) * x(1); },
      [](const Vector& x) { return x(0) * x(0) + 4 * x(1) * x(1); },
      [](const Vector& x) { return std::pow(x(0), 4) + 2 * x(1) * x(1); },
  };
  // Q_3 = x1^4 + 2 x2^2 has no positive quadratic lower bound at the origin;
  // 0.01 holds for |x| >= 0.1.
  s.vartheta = {1.0, 1.0, 0.01};
  s.vartheta_radius = 0.1;

  PlantModel& m = g.model;
  m.f = [](const Vector& x) {
    Vector dx(2);
    const double c = std::cos(2 * x(0)) + 2;
    const double sn = std::sin(4 * x(0) * x(0)) + 2;
    dx(0) = x(1);
    dx(1) = -x(1) + 0.5 * x(0) + 0.25 * x(1) * c * c + 0.25 * x(1) * sn * sn;
    return dx;
  };
  m.g = {
      [](const Vector& x) { return column(0, std::cos(2 * x(0)) + 2); },
      [](const Vector& x) { return column(0, std::sin(4 * x(0) * x(0)) + 2); },
  };
  m.p = [](const Vector& x) { return column(1, std::cos(x(0) * x(0)) + 4); };
  m.h = [](const Vector& x) {
    return column(std::sin(5 * x(0)) + 0.1, std::cos(2 * x(0) * x(0)) + 0.2);
  };

  const PolyBasis follower(2, 1, builtin_basis_terms("paper-sec5-follower"));
  g.value_bases = {follower, follower, PolyBasis(2, 1, builtin_basis_terms("paper-sec5-leader"))};
  g.leader_basis = PolyBasis(2, 0, builtin_basis_terms("paper-sec5-nu"));
  g.region = Box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};

  TuningParams& t = d.tuning;
  t.tau = {0.7, 0.7, 0.6};
  t.theta = {0.7, 0.7, 0.7};
  t.varrho = 0.6;
  t.F2 = {200, 200, 200};
  t.F1 = {Vector::Constant(5, 100), Vector::Constant(5, 100), Vector::Constant(5, 100)};

  SimConfig& c = d.sim;
  c.dt = 1e-3;
  c.t_end = 150.0;
  c.x0 = Vector::Constant(2, 0.01);
  c.init.kind = InitWeights::Kind::kUniform;
  c.init.low = 0.0;
  c.init.high = 1.0;
  c.disturbance.kind = DisturbanceConfig::Kind::kUniform;
  c.disturbance.bound = 0.5;
  return d;
}

ModelDefaults linear_test(const Matrix& A) {
  require(A.rows() == A.cols() && A.rows() > 0, "A must be square");
  const int n = static_cast<int>(A.rows());
  ModelDefaults d;
  Game& g = d.game;
  GameSpec& s = g.spec;
  s.n = n;
  s.followers = 1;
  s.m = {1};
  s.alpha = 1;
  s.w = 1;
  s.gamma2 = 1.0;
  s.R = {{scalar(1)}, {scalar(1)}};
  s.S = {scalar(1), scalar(1)};
  s.Q = {[](const Vector& x) { return x.squaredNorm(); },
         [](const Vector& x) { return x.squaredNorm(); }};
  s.vartheta = {1.0, 1.0};

  const Matrix b = Matrix::Ones(n, 1);
  g.model.f = [A](const Vector& x) { return Vector(A * x); };
  g.model.g = {[b](const Vector&) { return b; }};
  g.model.p = [b](const Vector&) { return b; };
  g.model.h = [b](const Vector&) { return b; };

  std::vector<Monomial> quad;
  std::vector<Monomial> lin;
  for (int a = 0; a < n; ++a) {
    Monomial l(n, 0);
    l[a] = 1;
    lin.push_back(l);
    for (int c = a; c < n; ++c) {
      Monomial t(n + 1, 0);
      t[a] += 1;
      t[c] += 1;
      quad.push_back(t);
    }
  }
  const PolyBasis value(n, 1, quad);
  g.value_bases = {value, value};
  g.leader_basis = PolyBasis(n, 0, lin);
  g.region = Box{Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)};

  TuningParams& t = d.tuning;
  const int kappa = value.size();
  t.tau = {1.0, 1.0};
  t.theta = {1.0, 1.0};
  t.varrho = 1.0;
  t.F2 = {10, 10};
  t.F1 = {Vector::Constant(kappa, 1.0), Vector::Constant(kappa, 1.0)};

  SimConfig& c = d.sim;
  c.x0 = Vector::Constant(n, 0.5);
  c.t_end = 1.0;
  c.disturbance.kind = DisturbanceConfig::Kind::kNone;
  c.probing.amplitude = 0.0;
  c.probing.cutoff = ProbingCutoff::kOff;
  c.init.kind = InitWeights::Kind::kExplicit;
  LearnerState zero;
  for (int i = 0; i < 2; ++i) {
    zero.Wv.push_back(Vector::Zero(kappa));
    zero.Wa.push_back(Vector::Zero(kappa));
  }
  zero.Wnu = Matrix::Zero(n, 1);
  c.init.values = zero;
  return d;
}

ModelDefaults builtin_model(const std::string& name) {
  if (name == "paper-sec5") return paper_sec5();
  if (name == "linear-test") {
    Matrix A(2, 2);
    A << 0, 1, -2, -3;
    return linear_test(A);
  }
  throw ConfigError("unknown model '" + name + "' (known: paper-sec5, linear-test)");
}

std::vector<std::string> builtin_model_names() { return {"paper-sec5", "linear-test"}; }

}  // namespace hadp
