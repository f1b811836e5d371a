// Acceptance suite: one PASS/FAIL line per criterion.
//
// The process exits 0 whenever the harness itself ran to completion, so a
// FAIL line is a reported result rather than a crashed test. Use --strict to
// turn any FAIL into exit code 1.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hadp/config.hpp"
#include "hadp/trajectory_io.hpp"
#include "hadp/verify.hpp"

using namespace hadp;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool passed;
  std::string detail;
};

struct SeedRun {
  std::uint64_t seed = 0;
  RunResult result;
  double wall_seconds = 0.0;
  ConvergenceSummary tail;
};

constexpr double kDetectorDeadline = 120.0;
constexpr double kStateBound = 5.0;
constexpr double kResidualBound = 0.05;
constexpr double kTailSeconds = 20.0;
constexpr double kWallBudget = 60.0;
constexpr double kGapFraction = 0.10;

RunConfig sec5_config(std::uint64_t seed) {
  RunConfig c = parse_config(R"({"model": "paper-sec5"})");
  apply_seed(c, seed);
  return c;
}

SeedRun run_seed(std::uint64_t seed) {
  const RunConfig c = sec5_config(seed);
  SeedRun r;
  r.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run(c.game, c.tuning, c.sim);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.tail = convergence_report_last(r.result.trajectory, kTailSeconds, r.result.stats.detector_time);
  return r;
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

Criterion from_checks(int id, const std::string& name, const std::vector<CheckResult>& checks) {
  Criterion c{id, name, true, ""};
  for (const CheckResult& r : checks) {
    c.passed = c.passed && r.passed;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += r.name + " err=" + fmt(r.max_error) + " tol=" + fmt(r.tolerance);
    if (!r.detail.empty()) c.detail += " (" + r.detail + ")";
  }
  return c;
}

std::string csv_of(const Trajectory& t) {
  std::ostringstream out;
  write_trajectory(t, out);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int runs = 10;
  int required = 8;
  std::string report_path;
  bool strict = false;
  app.add_option("--runs", runs, "Number of seeds for the reproduction criteria");
  app.add_option("--required", required, "Seeds that must pass out of --runs");
  app.add_option("--report", report_path, "Also write the report to this file");
  app.add_flag("--strict", strict, "Exit 1 if any criterion fails");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> results;
  std::ostringstream log;

  // 1-2: reproduction runs.
  std::vector<SeedRun> seed_runs;
  for (int k = 1; k <= runs; ++k) {
    seed_runs.push_back(run_seed(static_cast<std::uint64_t>(k)));
    const SeedRun& r = seed_runs.back();
    const RunStats& s = r.result.stats;
    log << "  seed " << k << ": status="
        << (s.status == RunStatus::kDiverged ? "diverged"
                                             : s.detector_time ? "converged" : "completed")
        << " detector=" << (s.detector_time ? fmt(*s.detector_time, 5) : "none")
        << " max|x|=" << fmt(s.max_state_norm) << " tail|e|=(";
    for (std::size_t i = 0; i < r.tail.tail_mean_abs_e.size(); ++i)
      log << (i ? "," : "") << fmt(r.tail.tail_mean_abs_e[i]);
    log << ") wall=" << fmt(r.wall_seconds) << "s\n";
    std::cerr << "seed " << k << " done in " << fmt(r.wall_seconds) << " s\n";
  }

  int repro_ok = 0;
  int agree_ok = 0;
  double worst_gap = 0.0;
  for (const SeedRun& r : seed_runs) {
    const RunStats& s = r.result.stats;
    const bool fired = s.detector_time && *s.detector_time <= kDetectorDeadline;
    bool residual_ok = s.status != RunStatus::kDiverged;
    for (double e : r.tail.tail_mean_abs_e) residual_ok = residual_ok && e < kResidualBound;
    if (fired && s.max_state_norm < kStateBound && residual_ok && r.wall_seconds <= kWallBudget)
      ++repro_ok;

    if (s.weights_at_detection) {
      const LearnerState& w = *s.weights_at_detection;
      bool all_close = true;
      for (std::size_t i = 0; i < w.Wv.size(); ++i) {
        const double rel = (w.Wv[i] - w.Wa[i]).norm() / std::max(w.Wv[i].norm(), 1e-300);
        worst_gap = std::max(worst_gap, rel);
        all_close = all_close && rel < kGapFraction;
      }
      if (all_close) ++agree_ok;
    }
  }
  results.push_back({1, "reproduction of the two-follower example", repro_ok >= required,
                     std::to_string(repro_ok) + "/" + std::to_string(runs) +
                         " seeds met detector<=120s, max|x|<5, tail|e_i|<0.05, wall<=60s"});
  {
    std::string detail = std::to_string(agree_ok) + "/" + std::to_string(runs) +
                         " seeds with |Wv_i-Wa_i| < 10% |Wv_i| at detector time";
    if (worst_gap > 0.0) detail += ", worst ratio " + fmt(worst_gap);
    else detail += " (detector never fired, no detector-time weights)";
    results.push_back({2, "actor-critic agreement", agree_ok >= required, detail});
  }

  // 3-8: oracles.
  VerifyOptions opts;
  results.push_back(from_checks(3, "stationarity oracle", {check_stationarity(opts)}));
  results.push_back(from_checks(4, "residual identity", {check_residual_identity(opts, 1000)}));
  results.push_back(from_checks(5, "gradient oracles",
                                {check_critic_gradient(opts), check_wnu_fd_order(opts),
                                 check_wnu_analytic(opts)}));
  results.push_back(from_checks(6, "fixed-point oracles",
                                {check_fixed_point(opts), check_lipschitz(opts),
                                 check_non_contractive(opts)}));
  results.push_back(from_checks(7, "integrator order", {check_integrator_order(opts)}));
  results.push_back(from_checks(8, "stability diagnostics", {check_m_matrix(opts)}));

  // 9: two runs from the same manifest.
  {
    const RunConfig c = sec5_config(1);
    ManifestInfo info;
    info.status = "pending";
    const std::string manifest = manifest_json(c, info);
    const RunConfig a = parse_config(manifest);
    const RunConfig b = parse_config(manifest);
    const std::string csv_a = csv_of(run(a.game, a.tuning, a.sim).trajectory);
    const std::string csv_b = csv_of(run(b.game, b.tuning, b.sim).trajectory);
    const bool same = csv_a == csv_b && !csv_a.empty();
    results.push_back({9, "determinism", same,
                       std::to_string(csv_a.size()) + " CSV bytes, " +
                           (same ? "identical" : "different") + ", config hash " +
                           config_hash(a)});
  }

  std::ostringstream out;
  bool all = true;
  for (const Criterion& c : results) {
    all = all && c.passed;
    out << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " -- "
        << c.detail << '\n';
  }
  out << "per-seed runs:\n" << log.str();
  std::cout << out.str();
  if (!report_path.empty()) std::ofstream(report_path) << out.str();
  return strict && !all ? 1 : 0;
}
