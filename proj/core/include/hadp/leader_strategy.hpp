#pragma once

// The leader's Stackelberg action: the pointwise fixed-point map
//
//   nu = rhs(x, nu) = -1/2 S_L^-1 [ -1/2 sum_j <d grad phi_j / d nu, A_j - Wa_j Wa_j^T grad phi_j B_j> + Pi ]
//
// split as rhs = Xi(x, nu) + xi(x), its Picard iteration, contraction
// diagnostics, the leader NN nu = Wnu^T phi_nu and its gradient law.

#include <cstdint>
#include <functional>
#include <vector>

#include "hadp/learners.hpp"

namespace hadp {

using LeaderMap = std::function<Vector(const Vector&)>;

/// rhs(x, .) frozen at one state and one weight snapshot. All weights are the
/// current estimates.
class NemytskiiMap {
 public:
  NemytskiiMap(const Game& game, const LearnerState& state, const Vector& x);

  int alpha() const { return alpha_; }
  const Vector& x() const { return x_; }

  /// xi(x) = -1/2 S_L^-1 Pi, the nu-independent part.
  const Vector& affine_part() const { return xi_; }
  /// Pi = p^T grad phi_L^T Wv_L
  const Vector& pi() const { return pi_; }
  /// A_j = Wa_j Wv_L^T grad phi_L G_j, kappa_j x n
  const Matrix& a_matrix(int j) const { return A_[static_cast<std::size_t>(j)]; }

  /// Xi(x, nu) = rhs(x, nu) - xi(x)
  Vector xi_part(const Vector& nu) const;
  Vector operator()(const Vector& nu) const { return xi_part(nu) + xi_; }
  /// d rhs / d nu, alpha x alpha, from the analytic second derivatives.
  Matrix jacobian(const Vector& nu) const;

  LeaderMap as_function() const;

 private:
  const Game* game_;
  const LearnerState* state_;
  Vector x_;
  int alpha_;
  Matrix s_inv_;
  Vector pi_;
  Vector xi_;
  std::vector<Matrix> A_;
  std::vector<Matrix> B_;
};

Vector nemytskii_rhs(const NemytskiiMap& map, const Vector& nu);

struct FixedPointReport {
  Vector nu_star;
  int iterations = 0;
  double final_step = 0.0;
  double contraction_estimate = 0.0;
  bool converged = false;
};

/// Picard iteration nu_{k+1} = map(nu_k); stops once |nu_{k+1} - nu_k| <= tol.
FixedPointReport fixed_point_solve(const LeaderMap& map, const Vector& nu0,
                                   double tol, int max_iter);

/// Max over seeded pairs in `region` of |map(a) - map(b)| / |a - b|.
/// The affine part cancels, so this is the Lipschitz coefficient of Xi.
double lipschitz_estimate(const LeaderMap& map, const Box& region,
                          int samples, std::uint64_t seed);

/// Wnu^T phi_nu
Vector leader_nn_eval(const Matrix& Wnu, const Vector& phi_nu);

/// d(Wnu^T phi_nu)/d Wnu as alpha slices of mu x alpha: slice c holds the
/// derivative of output component c.
std::vector<Matrix> leader_output_gradient(const Vector& phi_nu, int alpha);

/// e_nu = nu_nn - rhs(x, nu_nn) with nu_nn = Wnu^T phi_nu(x).
Vector e_nu_residual(const Game& game, const LearnerState& state,
                     const NemytskiiMap& map);

enum class WnuMode { kAnalytic, kNumeric };

/// -varrho d(e_nu^T e_nu)/d Wnu, mu x alpha. Analytic mode contracts the
/// output-gradient tensor with 2 (I - d rhs/d nu)^T e_nu; numeric mode uses
/// central differences in every entry of Wnu with step `fd_step`.
Matrix w_nu_rate(const Game& game, const LearnerState& state,
                 const NemytskiiMap& map, double varrho, WnuMode mode,
                 double fd_step = 1e-6);

}  // namespace hadp
