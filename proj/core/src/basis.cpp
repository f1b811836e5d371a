#include "hadp/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace hadp {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

// Partial derivative of a monomial; `order[k]` is the derivative order in z_k.
double monomial_derivative(const Monomial& e, const Vector& z,
                           const int* order) {
  double value = 1.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const int d = order ? order[k] : 0;
    if (d > e[k]) return 0.0;
    double c = 1.0;
    for (int s = 0; s < d; ++s) c *= static_cast<double>(e[k] - s);
    value *= c * ipow(z(static_cast<Eigen::Index>(k)), e[k] - d);
  }
  return value;
}

Vector joint(const PolyBasis& basis, const Vector& x, const Vector& nu) {
  require(x.size() == basis.n(), "basis state dimension mismatch");
  require(nu.size() == basis.alpha(), "basis leader dimension mismatch");
  Vector z(basis.n() + basis.alpha());
  z << x, nu;
  return z;
}

}  // namespace

PolyBasis::PolyBasis(int n, int alpha, std::vector<Monomial> terms)
    : n_(n), alpha_(alpha), terms_(std::move(terms)) {
  require(n > 0 && alpha >= 0, "basis dimensions must be positive");
  require(!terms_.empty(), "basis must have at least one term");
  std::set<Monomial> seen;
  for (const Monomial& t : terms_) {
    require(static_cast<int>(t.size()) == n + alpha,
            "monomial arity must be n + alpha");
    for (int e : t) require(e >= 0, "monomial exponents must be non-negative");
    require(std::accumulate(t.begin(), t.end(), 0) >= 1,
            "basis terms must have total degree >= 1");
    require(seen.insert(t).second, "duplicate basis term " + describe(t, n));
  }
}

bool PolyBasis::depends_on_nu() const {
  for (const Monomial& t : terms_)
    for (int a = 0; a < alpha_; ++a)
      if (t[n_ + a] > 0) return true;
  return false;
}

bool PolyBasis::vanishes_to_second_order() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Monomial& t) {
    return std::accumulate(t.begin(), t.end(), 0) >= 2;
  });
}

BasisEval eval_all(const PolyBasis& basis, const Vector& x, const Vector& nu) {
  const Vector z = joint(basis, x, nu);
  const int n = basis.n();
  const int alpha = basis.alpha();
  const int kappa = basis.size();
  const int dim = n + alpha;

  BasisEval out;
  out.phi.resize(kappa);
  out.grad_x.resize(kappa, n);
  out.dgrad_dnu.assign(alpha, Matrix(kappa, n));
  out.d2grad_dnu2.assign(static_cast<std::size_t>(alpha) * alpha, Matrix(kappa, n));

  std::vector<int> order(dim, 0);
  for (int r = 0; r < kappa; ++r) {
    const Monomial& t = basis.terms()[r];
    out.phi(r) = monomial_derivative(t, z, nullptr);
    for (int c = 0; c < n; ++c) {
      order[c] += 1;
      out.grad_x(r, c) = monomial_derivative(t, z, order.data());
      for (int a = 0; a < alpha; ++a) {
        order[n + a] += 1;
        out.dgrad_dnu[a](r, c) = monomial_derivative(t, z, order.data());
        for (int b = 0; b < alpha; ++b) {
          order[n + b] += 1;
          out.d2grad_dnu2[static_cast<std::size_t>(a) * alpha + b](r, c) =
              monomial_derivative(t, z, order.data());
          order[n + b] -= 1;
        }
        order[n + a] -= 1;
      }
      order[c] -= 1;
    }
  }
  return out;
}

Vector eval_phi(const PolyBasis& basis, const Vector& x, const Vector& nu) {
  const Vector z = joint(basis, x, nu);
  Vector phi(basis.size());
  for (int r = 0; r < basis.size(); ++r)
    phi(r) = monomial_derivative(basis.terms()[r], z, nullptr);
  return phi;
}

double fd_validate(const PolyBasis& basis, const Vector& x, const Vector& nu,
                   double h) {
  require(h > 0.0, "finite-difference step must be positive");
  const BasisEval at = eval_all(basis, x, nu);
  const int n = basis.n();
  const int alpha = basis.alpha();
  double worst = 0.0;
  auto track = [&worst](const Matrix& analytic, const Matrix& fd) {
    const Matrix scale = analytic.cwiseAbs().cwiseMax(1.0);
    worst = std::max(worst, ((analytic - fd).cwiseAbs().array() / scale.array()).maxCoeff());
  };

  // grad_x from phi
  Matrix fd_grad(basis.size(), n);
  for (int c = 0; c < n; ++c) {
    Vector xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    fd_grad.col(c) = (eval_phi(basis, xp, nu) - eval_phi(basis, xm, nu)) / (2.0 * h);
  }
  track(at.grad_x, fd_grad);

  // d(grad_x)/d nu from grad_x, and d2 from d(grad_x)/d nu
  for (int a = 0; a < alpha; ++a) {
    Vector np = nu, nm = nu;
    np(a) += h;
    nm(a) -= h;
    const BasisEval plus = eval_all(basis, x, np);
    const BasisEval minus = eval_all(basis, x, nm);
    track(at.dgrad_dnu[a], (plus.grad_x - minus.grad_x) / (2.0 * h));
    for (int b = 0; b < alpha; ++b) {
      track(at.d2(b, a), (plus.dgrad_dnu[b] - minus.dgrad_dnu[b]) / (2.0 * h));
    }
  }
  return worst;
}

std::string describe(const Monomial& term, int n) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < term.size(); ++k) {
    if (term[k] == 0) continue;
    if (!first) os << '*';
    first = false;
    if (static_cast<int>(k) < n) {
      os << 'x' << k + 1;
    } else {
      os << "nu" << static_cast<int>(k) - n + 1;
    }
    if (term[k] > 1) os << '^' << term[k];
  }
  return first ? "1" : os.str();
}

}  // namespace hadp
