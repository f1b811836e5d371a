#pragma once

// Closed-loop online learning: the plant and every weight vector integrated
// jointly with fixed-step RK4.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hadp/leader_strategy.hpp"

namespace hadp {

struct InitWeights {
  enum class Kind { kUniform, kExplicit };
  Kind kind = Kind::kUniform;
  double low = 0.0;
  double high = 1.0;
  std::uint64_t seed = 1;
  std::optional<LearnerState> values;  ///< used when kind == kExplicit
};

enum class ProbingCutoff { kOnUntilConverged, kAlways, kOff };

struct ProbingConfig {
  double amplitude = 0.1;  ///< standard deviation of the Gaussian probe
  std::uint64_t seed = 2;
  ProbingCutoff cutoff = ProbingCutoff::kOnUntilConverged;
};

struct DisturbanceConfig {
  enum class Kind { kNone, kUniform };
  Kind kind = Kind::kUniform;
  double bound = 0.5;  ///< uniform on [-bound, bound] per component
  std::uint64_t seed = 3;
};

struct ConvergenceConfig {
  double window = 5.0;      ///< seconds every rate norm must stay below threshold
  double threshold = 0.05;  ///< on each of |dWv_i|, |dWa_i|, |dWnu|
  double settle = 20.0;     ///< seconds integrated after the detector fires
  bool stop_after_settle = true;
};

enum class LeaderApply { kNeuralNetwork, kFixedPoint };

struct LeaderConfig {
  double fp_tol = 1e-8;
  int fp_max_iter = 100;
  WnuMode wnu_mode = WnuMode::kAnalytic;
  ActorSum actor_sum = ActorSum::kAllPlayers;
  LeaderApply apply = LeaderApply::kNeuralNetwork;
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 150.0;
  Vector x0;
  InitWeights init;
  ProbingConfig probing;
  DisturbanceConfig disturbance;
  ConvergenceConfig convergence;
  LeaderConfig leader;
  int record_every = 10;        ///< steps between trajectory rows
  double progress_every = 0.0;  ///< simulated seconds between log lines; 0 = silent
  bool learning = true;         ///< false freezes every weight (rates forced to 0)

  void validate(const Game& game) const;
};

struct TrajectoryRow {
  double t = 0.0;
  Vector x;
  std::vector<Vector> u;          ///< u_hat_j (without probing)
  Vector nu;                      ///< leader NN output
  Vector omega_applied;
  std::vector<double> e;          ///< e_1..e_{N+1}
  double e_nu_norm = 0.0;
  std::vector<Vector> Wv;
  std::vector<Vector> Wa;
  Matrix Wnu;
  int fp_iters = 0;
  std::vector<Vector> omega_hat;  ///< omega_hat_1..omega_hat_{N+1}

  friend bool operator==(const TrajectoryRow& a, const TrajectoryRow& b);
};

struct TrajectoryLayout {
  int n = 0;
  std::vector<int> m;
  int alpha = 0;
  int w = 0;
  std::vector<int> kappa;  ///< N+1
  int mu = 0;

  int followers() const { return static_cast<int>(m.size()); }
  static TrajectoryLayout of(const Game& game);
  friend bool operator==(const TrajectoryLayout&, const TrajectoryLayout&) = default;
};

struct Trajectory {
  TrajectoryLayout layout;
  std::vector<TrajectoryRow> rows;

  friend bool operator==(const Trajectory& a, const Trajectory& b) {
    return a.layout == b.layout && a.rows == b.rows;
  }
};

/// Joint ODE state.
struct JointState {
  Vector x;
  LearnerState w;
};

/// Forcing held constant over one integration step.
struct StepForcing {
  std::vector<Vector> probe_u;
  Vector probe_nu;
  Vector omega;
  std::optional<Vector> nu_override;  ///< applied leader action, if fixed

  static StepForcing zeros(const GameSpec& spec);
};

/// Time derivatives of the joint state at one point, with the pieces the
/// simulator logs.
struct JointRates {
  Vector dx;
  std::vector<Vector> dWv;
  std::vector<Vector> dWa;
  Matrix dWnu;
  ClosedLoopPoint point;
  Vector e_nu;

  double max_weight_rate() const;
};

JointRates joint_rates(const Game& game, const TuningParams& tuning,
                       const LeaderConfig& leader, const JointState& s,
                       const StepForcing& forcing, bool learning = true);

/// One RK4 step; actions are recomputed at every stage. Throws
/// DivergenceError on non-finite values, |x| > 1e6 or any weight norm > 1e6.
JointState step(const Game& game, const TuningParams& tuning,
                const LeaderConfig& leader, const JointState& s, double t,
                double dt, const StepForcing& forcing, bool learning = true);

enum class RunStatus { kCompleted, kConverged, kDiverged };

struct RunStats {
  RunStatus status = RunStatus::kCompleted;
  std::optional<double> detector_time;
  double t_final = 0.0;
  long steps = 0;
  long fp_failures = 0;  ///< steps where the Picard iteration did not converge
  double max_state_norm = 0.0;
  std::string message;
  /// Weights at the moment the detector fired.
  std::optional<LearnerState> weights_at_detection;
};

struct RunResult {
  Trajectory trajectory;
  RunStats stats;
};

using ProgressSink = std::function<void(const std::string&)>;

/// Builds the initial learner state from config (seeded uniform or explicit).
LearnerState initial_weights(const Game& game, const InitWeights& init);

RunResult run(const Game& game, const TuningParams& tuning,
              const SimConfig& config, const ProgressSink& progress = {});

struct ConvergenceSummary {
  std::vector<double> tail_mean_abs_e;  ///< N+1
  double tail_mean_e_nu = 0.0;
  std::vector<Vector> final_Wv;
  std::vector<Vector> final_Wa;
  Matrix final_Wnu;
  std::vector<double> critic_actor_gap;  ///< |Wv_i - Wa_i| at the last row
  std::optional<double> detector_time;
  double max_state_norm = 0.0;
};

/// Metrics over the trailing `tail_fraction` of the time span.
ConvergenceSummary convergence_report(const Trajectory& traj,
                                      double tail_fraction,
                                      std::optional<double> detector_time = {});

/// Metrics over the last `seconds` of simulated time.
ConvergenceSummary convergence_report_last(const Trajectory& traj,
                                           double seconds,
                                           std::optional<double> detector_time = {});

}  // namespace hadp
