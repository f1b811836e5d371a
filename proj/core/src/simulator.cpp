#include "hadp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hadp {

namespace {

constexpr double kDivergenceLimit = 1e6;

bool rows_equal(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size() || a[k] != b[k]) return false;
  }
  return true;
}

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

JointState advance(const JointState& s, const JointRates& r, double h) {
  JointState out;
  out.x = s.x + h * r.dx;
  out.w.Wv.resize(s.w.Wv.size());
  out.w.Wa.resize(s.w.Wa.size());
  for (std::size_t i = 0; i < s.w.Wv.size(); ++i) {
    out.w.Wv[i] = s.w.Wv[i] + h * r.dWv[i];
    out.w.Wa[i] = s.w.Wa[i] + h * r.dWa[i];
  }
  out.w.Wnu = s.w.Wnu + h * r.dWnu;
  return out;
}

void check_bounded(const JointState& s, double t) {
  std::ostringstream msg;
  if (!s.x.allFinite() || !s.w.finite()) {
    msg << "non-finite state at t=" << t;
    throw DivergenceError(msg.str(), t);
  }
  if (s.x.norm() > kDivergenceLimit) {
    msg << "state norm " << s.x.norm() << " exceeds 1e6 at t=" << t;
    throw DivergenceError(msg.str(), t);
  }
  auto too_big = [](const Vector& v) { return v.norm() > kDivergenceLimit; };
  bool big = s.w.Wnu.norm() > kDivergenceLimit;
  for (const Vector& v : s.w.Wv) big = big || too_big(v);
  for (const Vector& v : s.w.Wa) big = big || too_big(v);
  if (big) {
    msg << "weight norm exceeds 1e6 at t=" << t;
    throw DivergenceError(msg.str(), t);
  }
}

}  // namespace

bool operator==(const TrajectoryRow& a, const TrajectoryRow& b) {
  return a.t == b.t && same(a.x, b.x) && rows_equal(a.u, b.u) && same(a.nu, b.nu) &&
         same(a.omega_applied, b.omega_applied) && a.e == b.e &&
         a.e_nu_norm == b.e_nu_norm && rows_equal(a.Wv, b.Wv) &&
         rows_equal(a.Wa, b.Wa) && a.Wnu.rows() == b.Wnu.rows() &&
         a.Wnu.cols() == b.Wnu.cols() && a.Wnu == b.Wnu && a.fp_iters == b.fp_iters &&
         rows_equal(a.omega_hat, b.omega_hat);
}

TrajectoryLayout TrajectoryLayout::of(const Game& game) {
  TrajectoryLayout l;
  l.n = game.spec.n;
  l.m = game.spec.m;
  l.alpha = game.spec.alpha;
  l.w = game.spec.w;
  for (int i = 0; i < game.players(); ++i) l.kappa.push_back(game.kappa(i));
  l.mu = game.mu();
  return l;
}

void SimConfig::validate(const Game& game) const {
  require(dt > 0.0, "dt must be > 0");
  require(t_end >= dt, "t_end must be >= dt");
  require(x0.size() == game.spec.n, "x0 must have n entries");
  require(x0.allFinite(), "x0 must be finite");
  require(probing.amplitude >= 0.0, "probing amplitude must be >= 0");
  require(disturbance.bound >= 0.0, "disturbance bound must be >= 0");
  require(convergence.window > 0.0, "convergence window must be > 0");
  require(convergence.threshold > 0.0, "convergence threshold must be > 0");
  require(convergence.settle >= 0.0, "settle time must be >= 0");
  require(leader.fp_tol > 0.0, "leader.fp_tol must be > 0");
  require(leader.fp_max_iter >= 1, "leader.fp_max_iter must be >= 1");
  require(record_every >= 1, "record_every must be >= 1");
  if (init.kind == InitWeights::Kind::kUniform) {
    require(init.high >= init.low, "init weight range must have low <= high");
  } else {
    require(init.values.has_value(), "explicit initial weights missing");
    const LearnerState& v = *init.values;
    require(static_cast<int>(v.Wv.size()) == game.players() &&
                static_cast<int>(v.Wa.size()) == game.players(),
            "explicit weights need N+1 critic and actor vectors");
    for (int i = 0; i < game.players(); ++i) {
      require(v.Wv[i].size() == game.kappa(i) && v.Wa[i].size() == game.kappa(i),
              "explicit weight vector length must equal kappa_i");
    }
    require(v.Wnu.rows() == game.mu() && v.Wnu.cols() == game.spec.alpha,
            "explicit Wnu must be mu x alpha");
  }
}

StepForcing StepForcing::zeros(const GameSpec& spec) {
  StepForcing f;
  for (int j = 0; j < spec.followers; ++j) f.probe_u.push_back(Vector::Zero(spec.m[j]));
  f.probe_nu = Vector::Zero(spec.alpha);
  f.omega = Vector::Zero(spec.w);
  return f;
}

double JointRates::max_weight_rate() const {
  double r = dWnu.norm();
  for (const Vector& v : dWv) r = std::max(r, v.norm());
  for (const Vector& v : dWa) r = std::max(r, v.norm());
  return r;
}

JointRates joint_rates(const Game& game, const TuningParams& tuning,
                       const LeaderConfig& leader, const JointState& s,
                       const StepForcing& forcing, bool learning) {
  const GameSpec& spec = game.spec;
  const int N = spec.followers;
  const Vector phi_nu = eval_phi(game.leader_basis, s.x, Vector());
  const Vector nu_nn = leader_nn_eval(s.w.Wnu, phi_nu);

  JointRates r;
  r.point = evaluate_point(game, s.w, s.x, nu_nn);
  const ClosedLoopPoint& pt = r.point;

  const Vector nu_applied = forcing.nu_override ? *forcing.nu_override : nu_nn;
  r.dx = pt.plant.f + pt.plant.p * (nu_applied + forcing.probe_nu) +
         pt.plant.h * forcing.omega;
  for (int j = 0; j < N; ++j)
    r.dx.noalias() += pt.plant.g[j] * (pt.u_hat[j] + forcing.probe_u[j]);

  const NemytskiiMap map(game, s.w, s.x);
  r.e_nu = nu_nn - map(nu_nn);

  r.dWv.resize(N + 1);
  r.dWa.resize(N + 1);
  if (!learning) {
    for (int i = 0; i <= N; ++i) {
      r.dWv[i] = Vector::Zero(game.kappa(i));
      r.dWa[i] = Vector::Zero(game.kappa(i));
    }
    r.dWnu = Matrix::Zero(s.w.Wnu.rows(), s.w.Wnu.cols());
    return r;
  }

  for (int i = 0; i <= N; ++i) {
    const double bracket = critic_bracket(spec, i, pt, s.w);
    const double e = pt.residual[i];
    if (std::abs(bracket - e) > 1e-8 * (1.0 + std::abs(e))) {
      std::ostringstream msg;
      msg << "critic bracket and HJB residual disagree for player " << i + 1
          << ": " << bracket << " vs " << e;
      throw std::logic_error(msg.str());
    }
    r.dWv[i] = critic_rate(tuning, i, pt.signals[i], bracket);
  }
  for (int i = 0; i < N; ++i)
    r.dWa[i] = actor_rate_follower(spec, i, tuning, s.w, pt.signals, pt.sh, leader.actor_sum);
  r.dWa[N] = actor_rate_leader(spec, tuning, s.w, pt.signals, pt.sh);
  r.dWnu = w_nu_rate(game, s.w, map, tuning.varrho, leader.wnu_mode);
  return r;
}

JointState step(const Game& game, const TuningParams& tuning,
                const LeaderConfig& leader, const JointState& s, double t,
                double dt, const StepForcing& forcing, bool learning) {
  const JointRates k1 = joint_rates(game, tuning, leader, s, forcing, learning);
  const JointRates k2 =
      joint_rates(game, tuning, leader, advance(s, k1, 0.5 * dt), forcing, learning);
  const JointRates k3 =
      joint_rates(game, tuning, leader, advance(s, k2, 0.5 * dt), forcing, learning);
  const JointRates k4 = joint_rates(game, tuning, leader, advance(s, k3, dt), forcing, learning);

  JointState out = s;
  out.x += dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  for (std::size_t i = 0; i < s.w.Wv.size(); ++i) {
    out.w.Wv[i] += dt / 6.0 * (k1.dWv[i] + 2.0 * k2.dWv[i] + 2.0 * k3.dWv[i] + k4.dWv[i]);
    out.w.Wa[i] += dt / 6.0 * (k1.dWa[i] + 2.0 * k2.dWa[i] + 2.0 * k3.dWa[i] + k4.dWa[i]);
  }
  out.w.Wnu += dt / 6.0 * (k1.dWnu + 2.0 * k2.dWnu + 2.0 * k3.dWnu + k4.dWnu);
  check_bounded(out, t + dt);
  return out;
}

LearnerState initial_weights(const Game& game, const InitWeights& init) {
  if (init.kind == InitWeights::Kind::kExplicit) return *init.values;
  std::mt19937_64 rng(init.seed);
  std::uniform_real_distribution<double> dist(init.low, init.high);
  LearnerState s = LearnerState::zeros(game);
  auto fill = [&](auto& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = dist(rng);
  };
  for (auto& v : s.Wv) fill(v);
  for (auto& v : s.Wa) fill(v);
  fill(s.Wnu);
  return s;
}

namespace {

TrajectoryRow make_row(double t, const JointState& s, const JointRates& r,
                       const StepForcing& forcing, int fp_iters) {
  TrajectoryRow row;
  row.t = t;
  row.x = s.x;
  row.u = r.point.u_hat;
  row.nu = r.point.nu_hat;
  row.omega_applied = forcing.omega;
  row.e = r.point.residual;
  row.e_nu_norm = r.e_nu.norm();
  row.Wv = s.w.Wv;
  row.Wa = s.w.Wa;
  row.Wnu = s.w.Wnu;
  row.fp_iters = fp_iters;
  row.omega_hat = r.point.omega_hat;
  return row;
}

}  // namespace

RunResult run(const Game& game, const TuningParams& tuning,
              const SimConfig& config, const ProgressSink& progress) {
  config.validate(game);
  tuning.validate(game);
  const GameSpec& spec = game.spec;

  RunResult result;
  result.trajectory.layout = TrajectoryLayout::of(game);
  RunStats& stats = result.stats;

  JointState s{config.x0, initial_weights(game, config.init)};
  std::mt19937_64 probe_rng(config.probing.seed);
  std::mt19937_64 dist_rng(config.disturbance.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  const double dt = config.dt;
  long total_steps = std::lround(config.t_end / dt);
  bool probing_on = config.probing.cutoff != ProbingCutoff::kOff && config.probing.amplitude > 0.0;
  double below_since = -1.0;  // start of the current quiet stretch; < 0 when none
  const long progress_stride =
      config.progress_every > 0.0 ? std::max(1L, std::lround(config.progress_every / dt)) : 0;

  StepForcing forcing = StepForcing::zeros(spec);
  int fp_iters = 0;
  long k = 0;
  try {
    for (; k < total_steps; ++k) {
      const double t = static_cast<double>(k) * dt;

      if (probing_on) {
        for (auto& v : forcing.probe_u)
          for (Eigen::Index c = 0; c < v.size(); ++c) v(c) = config.probing.amplitude * normal(probe_rng);
        for (Eigen::Index c = 0; c < forcing.probe_nu.size(); ++c)
          forcing.probe_nu(c) = config.probing.amplitude * normal(probe_rng);
      } else {
        for (auto& v : forcing.probe_u) v.setZero();
        forcing.probe_nu.setZero();
      }
      if (config.disturbance.kind == DisturbanceConfig::Kind::kUniform) {
        for (Eigen::Index c = 0; c < forcing.omega.size(); ++c)
          forcing.omega(c) = config.disturbance.bound * uniform(dist_rng);
      }

      {
        const NemytskiiMap map(game, s.w, s.x);
        const FixedPointReport fp = fixed_point_solve(map.as_function(), map.affine_part(),
                                                      config.leader.fp_tol,
                                                      config.leader.fp_max_iter);
        fp_iters = fp.iterations;
        forcing.nu_override.reset();
        if (!fp.converged) {
          ++stats.fp_failures;
        } else if (config.leader.apply == LeaderApply::kFixedPoint) {
          forcing.nu_override = fp.nu_star;
        }
      }

      const JointRates k1 = joint_rates(game, tuning, config.leader, s, forcing, config.learning);
      stats.max_state_norm = std::max(stats.max_state_norm, s.x.norm());
      if (k % config.record_every == 0)
        result.trajectory.rows.push_back(make_row(t, s, k1, forcing, fp_iters));

      if (!stats.detector_time) {
        if (k1.max_weight_rate() < config.convergence.threshold) {
          if (below_since < 0.0) below_since = t;
          if (t - below_since >= config.convergence.window) {
            stats.detector_time = t;
            stats.weights_at_detection = s.w;
            if (config.probing.cutoff == ProbingCutoff::kOnUntilConverged) probing_on = false;
            if (config.convergence.stop_after_settle) {
              const long stop = k + std::lround(config.convergence.settle / dt);
              total_steps = std::min(total_steps, stop);
            }
          }
        } else {
          below_since = -1.0;
        }
      }

      if (progress_stride > 0 && k % progress_stride == 0 && progress) {
        std::ostringstream line;
        line << "t=" << t << " |x|=" << s.x.norm() << " max|dW|=" << k1.max_weight_rate();
        for (std::size_t i = 0; i < k1.point.residual.size(); ++i)
          line << " e" << i + 1 << "=" << k1.point.residual[i];
        progress(line.str());
      }

      s = step(game, tuning, config.leader, s, t, dt, forcing, config.learning);
    }
    const double t = static_cast<double>(k) * dt;
    const JointRates last = joint_rates(game, tuning, config.leader, s, forcing, config.learning);
    stats.max_state_norm = std::max(stats.max_state_norm, s.x.norm());
    if (result.trajectory.rows.empty() || result.trajectory.rows.back().t < t)
      result.trajectory.rows.push_back(make_row(t, s, last, forcing, fp_iters));
    stats.status = stats.detector_time ? RunStatus::kConverged : RunStatus::kCompleted;
    stats.t_final = t;
  } catch (const DivergenceError& err) {
    stats.status = RunStatus::kDiverged;
    stats.message = err.what();
    stats.t_final = err.time();
  }
  stats.steps = k;
  return result;
}

namespace {

ConvergenceSummary summarize(const Trajectory& traj, double t_from,
                             std::optional<double> detector_time) {
  require(!traj.rows.empty(), "convergence_report needs a non-empty trajectory");
  ConvergenceSummary out;
  const std::size_t players = traj.rows.front().e.size();
  out.tail_mean_abs_e.assign(players, 0.0);
  std::size_t count = 0;
  for (const TrajectoryRow& row : traj.rows) {
    out.max_state_norm = std::max(out.max_state_norm, row.x.norm());
    if (row.t < t_from) continue;
    for (std::size_t i = 0; i < players; ++i) out.tail_mean_abs_e[i] += std::abs(row.e[i]);
    out.tail_mean_e_nu += row.e_nu_norm;
    ++count;
  }
  if (count > 0) {
    for (double& v : out.tail_mean_abs_e) v /= static_cast<double>(count);
    out.tail_mean_e_nu /= static_cast<double>(count);
  }
  const TrajectoryRow& last = traj.rows.back();
  out.final_Wv = last.Wv;
  out.final_Wa = last.Wa;
  out.final_Wnu = last.Wnu;
  for (std::size_t i = 0; i < last.Wv.size(); ++i)
    out.critic_actor_gap.push_back((last.Wv[i] - last.Wa[i]).norm());
  out.detector_time = detector_time;
  return out;
}

}  // namespace

ConvergenceSummary convergence_report(const Trajectory& traj, double tail_fraction,
                                      std::optional<double> detector_time) {
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail_fraction must be in (0, 1]");
  require(!traj.rows.empty(), "convergence_report needs a non-empty trajectory");
  const double t0 = traj.rows.front().t;
  const double t1 = traj.rows.back().t;
  return summarize(traj, t1 - tail_fraction * (t1 - t0), detector_time);
}

ConvergenceSummary convergence_report_last(const Trajectory& traj, double seconds,
                                           std::optional<double> detector_time) {
  require(seconds > 0.0, "tail length must be positive");
  require(!traj.rows.empty(), "convergence_report needs a non-empty trajectory");
  return summarize(traj, traj.rows.back().t - seconds, detector_time);
}

}  // namespace hadp
