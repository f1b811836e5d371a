#pragma once

// Computable pieces of the Lyapunov argument behind the tuning laws: the M
// matrix, the Lambda vector, the Upsilon surrogate and the UUB radius window.
//
// Ideal weights are unknown, so every quantity here substitutes the current
// estimates (and e_i for the HJB approximation error, 0 for its gradient).
// The result is a tuning aid, not a certificate.

#include <cstdint>
#include <optional>
#include <vector>

#include "hadp/learners.hpp"

namespace hadp {

/// Block partition of M: state, N+1 critic scalars, N+1 actor blocks, leader.
struct MLayout {
  std::vector<int> offset;  ///< 2N+4 block starts
  std::vector<int> size;    ///< 2N+4 block sizes
  int total = 0;

  static MLayout of(const Game& game);
  int blocks() const { return static_cast<int>(size.size()); }
};

/// M at one closed-loop point; exactly symmetric.
Matrix assemble_M(const Game& game, const TuningParams& tuning,
                  const LearnerState& state, const ClosedLoopPoint& pt);
Matrix assemble_M(const Game& game, const TuningParams& tuning,
                  const LearnerState& state, const Vector& x);

/// Lambda vector with every grad-epsilon term set to zero.
Vector assemble_Lambda(const Game& game, const TuningParams& tuning,
                       const LearnerState& state, const ClosedLoopPoint& pt);

/// Upsilon with |e_i| in place of the HJB approximation error.
double upsilon(const Game& game, const LearnerState& state,
               const ClosedLoopPoint& pt);

/// Norm of the vertically stacked S_1..S_{N+1}.
double stacked_S_norm(const GameSpec& spec);

struct UubWindow {
  bool pd = false;
  bool radicand_ok = false;
  double radicand = 0.0;
  std::optional<double> r1;
  std::optional<double> r2;
  std::optional<double> ub_threshold;
};

UubWindow uub_window(double lambda_m, double Lambda_m, double Upsilon_m,
                     double S_m);

struct ProofBounds {
  double lambda_m = 0.0;  ///< min over samples of lambda_min(M)
  double Lambda_m = 0.0;
  double Upsilon_m = 0.0;
  double S_m = 0.0;
};

/// Sampled suprema over `region` (centre, corners, then seeded uniform draws).
ProofBounds sample_proof_bounds(const Game& game, const TuningParams& tuning,
                                const LearnerState& state, const Box& region,
                                int samples, std::uint64_t seed);

struct StabilityReport {
  double lambda_m = 0.0;
  double Lambda_m = 0.0;
  double Upsilon_m = 0.0;
  double S_m = 0.0;
  std::optional<double> r1;
  std::optional<double> r2;
  std::optional<double> ub_threshold;
  bool pd = false;
  bool radicand_ok = false;
  bool estimate_substituted = true;
  bool grad_epsilon_zeroed = true;
  int samples = 0;
};

StabilityReport stability_report(const Game& game, const TuningParams& tuning,
                                 const LearnerState& state, int samples = 256,
                                 std::uint64_t seed = 7);

}  // namespace hadp
