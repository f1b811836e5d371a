#pragma once

// Polynomial activation sets over (x, nu) with exact derivatives.

#include <string>
#include <vector>

#include "hadp/types.hpp"

namespace hadp {

/// Exponents over the joint variable z = (x_1..x_n, nu_1..nu_alpha).
using Monomial = std::vector<int>;

class PolyBasis {
 public:
  PolyBasis() = default;
  /// Throws ConfigError on constant terms, duplicates or wrong arity.
  PolyBasis(int n, int alpha, std::vector<Monomial> terms);

  int n() const { return n_; }
  int alpha() const { return alpha_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const std::vector<Monomial>& terms() const { return terms_; }

  /// True when some term carries a positive exponent on a nu variable.
  bool depends_on_nu() const;
  /// True when every term has total degree >= 2.
  bool vanishes_to_second_order() const;

 private:
  int n_ = 0;
  int alpha_ = 0;
  std::vector<Monomial> terms_;
};

/// Values and derivatives of a basis at one (x, nu).
///
/// dgrad_dnu[a] is d(grad_x phi)/d nu_a and d2grad_dnu2[a * alpha + b] is
/// d^2(grad_x phi)/(d nu_a d nu_b); every slice is kappa x n.
struct BasisEval {
  Vector phi;
  Matrix grad_x;
  std::vector<Matrix> dgrad_dnu;
  std::vector<Matrix> d2grad_dnu2;

  const Matrix& d2(int a, int b) const {
    return d2grad_dnu2[static_cast<std::size_t>(a) * dgrad_dnu.size() + b];
  }
};

BasisEval eval_all(const PolyBasis& basis, const Vector& x, const Vector& nu);

/// Only phi; skips all derivative work.
Vector eval_phi(const PolyBasis& basis, const Vector& x, const Vector& nu);

/// Worst discrepancy between analytic derivatives and central differences,
/// normalised by max(1, |analytic|) entrywise.
double fd_validate(const PolyBasis& basis, const Vector& x, const Vector& nu,
                   double h);

/// Human-readable term, e.g. "x1^2*nu1".
std::string describe(const Monomial& term, int n);

}  // namespace hadp
