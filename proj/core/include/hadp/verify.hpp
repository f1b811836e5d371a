#pragma once

// Self-check suite behind `hadp verify`: every derivative, identity and
// solver in the library checked against an independent computation.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hadp/builtin_models.hpp"

namespace hadp {

struct RandomGameOptions {
  int max_n = 3;
  int max_followers = 3;
  int max_alpha = 2;
  int max_w = 2;
  int max_m = 2;
  /// Forces alpha = 1 when set.
  bool scalar_leader = false;
};

/// A random smooth game with random polynomial bases. Follower bases carry
/// nu^2 terms so the leader map is nonlinear in nu.
Game random_game(std::uint64_t seed, const RandomGameOptions& opts = {});
TuningParams random_tuning(const Game& game, std::uint64_t seed);
LearnerState random_weights(const Game& game, std::uint64_t seed, double scale = 1.0);
Vector random_point(const Box& box, std::uint64_t seed);

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

using ControlFn = std::function<Vector(const GameSpec&, int, const BasisEval&,
                                       const Vector&, const Matrix&)>;

struct VerifyOptions {
  std::uint64_t seed = 2024;
  int games = 5;
  int points = 100;
  /// Control law under test in the stationarity check.
  ControlFn control;
};

CheckResult check_basis_fd(const VerifyOptions& opts);
CheckResult check_stationarity(const VerifyOptions& opts);
CheckResult check_residual_identity(const VerifyOptions& opts, int samples = 1000);
CheckResult check_critic_gradient(const VerifyOptions& opts);
/// Observed order of the central-difference w_nu_rate against the analytic
/// rate on a step ladder; max_error is |order - 2|.
CheckResult check_wnu_fd_order(const VerifyOptions& opts);
CheckResult check_wnu_analytic(const VerifyOptions& opts);
CheckResult check_fixed_point(const VerifyOptions& opts);
CheckResult check_lipschitz(const VerifyOptions& opts);
CheckResult check_non_contractive(const VerifyOptions& opts);
/// max_error is the distance of the measured order from [3.7, 4.3].
CheckResult check_integrator_order(const VerifyOptions& opts);
CheckResult check_m_matrix(const VerifyOptions& opts);

/// Measured RK4 self-convergence order on the linear test plant, one value
/// per consecutive dt pair of the ladder.
std::vector<double> integrator_orders(const std::vector<double>& dts, double t_end);

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

VerifyReport cmd_verify(const VerifyOptions& opts = {});
std::string format_report(const VerifyReport& report);

}  // namespace hadp
