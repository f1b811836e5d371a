// hadp: run, sweep, diagnose and self-check the online learning solver.
//
// Exit codes: 0 ok, 1 check failure, 2 config error, 3 divergence abort.
// HADP_LOG_LEVEL=quiet|info|debug controls progress lines on stderr.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "hadp/config.hpp"
#include "hadp/stability_diag.hpp"
#include "hadp/trajectory_io.hpp"
#include "hadp/verify.hpp"

namespace fs = std::filesystem;
using namespace hadp;

namespace {

enum class LogLevel { kQuiet, kInfo, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("HADP_LOG_LEVEL");
  const std::string v = env ? env : "info";
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kDiverged: return "diverged";
    default: return "completed";
  }
}

struct RunOutcome {
  RunResult result;
  double seconds = 0.0;
};

RunOutcome execute(RunConfig& cfg, const std::string& tag) {
  const LogLevel level = log_level();
  if (level == LogLevel::kDebug && cfg.sim.progress_every <= 0.0) cfg.sim.progress_every = 10.0;
  ProgressSink sink;
  if (level != LogLevel::kQuiet) {
    sink = [tag](const std::string& line) { std::cerr << tag << line << '\n'; };
  }
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.result = run(cfg.game, cfg.tuning, cfg.sim, sink);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_outputs(const RunConfig& cfg, const RunOutcome& o, const fs::path& dir) {
  fs::create_directories(dir);
  write_trajectory(o.result.trajectory, (dir / "trajectory.csv").string());
  ManifestInfo info;
  info.runtime_seconds = o.seconds;
  info.status = status_name(o.result.stats.status);
  info.detector_time = o.result.stats.detector_time;
  info.fp_failures = o.result.stats.fp_failures;
  std::ofstream(dir / "manifest.json") << manifest_json(cfg, info) << '\n';
}

void print_summary(std::ostream& out, const RunConfig& cfg, const RunOutcome& o) {
  const RunStats& st = o.result.stats;
  out << "status " << status_name(st.status) << "\n"
      << "t_final " << st.t_final << "\n"
      << "detector_time " << (st.detector_time ? std::to_string(*st.detector_time) : "none") << "\n"
      << "max_state_norm " << st.max_state_norm << "\n"
      << "fp_failures " << st.fp_failures << "\n"
      << "wall_seconds " << o.seconds << "\n"
      << "config_hash " << config_hash(cfg) << "\n";
  if (!st.message.empty()) out << "message " << st.message << "\n";
  if (!o.result.trajectory.rows.empty()) {
    const ConvergenceSummary s = convergence_report_last(o.result.trajectory, 20.0, st.detector_time);
    for (std::size_t i = 0; i < s.tail_mean_abs_e.size(); ++i)
      out << "tail_mean_abs_e_" << i + 1 << " " << s.tail_mean_abs_e[i] << "\n";
  }
}

int cmd_simulate(const std::string& path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(path);
  if (seed) apply_seed(cfg, *seed);
  const RunOutcome o = execute(cfg, "");
  write_outputs(cfg, o, out_dir);
  print_summary(std::cout, cfg, o);
  return o.result.stats.status == RunStatus::kDiverged ? 3 : 0;
}

int cmd_sweep(const std::string& path, const std::string& range, const std::string& out_dir,
              unsigned jobs) {
  const auto dots = range.find("..");
  if (dots == std::string::npos) throw ConfigError("--seeds must look like a..b");
  const std::uint64_t a = std::stoull(range.substr(0, dots));
  const std::uint64_t b = std::stoull(range.substr(dots + 2));
  if (b < a) throw ConfigError("--seeds range is empty");
  const RunConfig base = load_config(path);
  const std::size_t count = b - a + 1;
  std::vector<RunConfig> cfgs(count, base);
  std::vector<RunOutcome> outcomes(count);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::vector<std::string> errors(count);
  auto worker = [&]() {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        apply_seed(cfgs[k], a + k);
        outcomes[k] = execute(cfgs[k], "[seed " + std::to_string(a + k) + "] ");
        write_outputs(cfgs[k], outcomes[k], fs::path(out_dir) / ("seed_" + std::to_string(a + k)));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors[k] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = 0;
  std::cout << "seed,status,detector_time,max_state_norm,wall_seconds\n";
  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k].empty()) {
      std::cout << a + k << ",error,," << ",\n";
      std::cerr << "seed " << a + k << ": " << errors[k] << '\n';
      code = std::max(code, 2);
      continue;
    }
    const RunStats& st = outcomes[k].result.stats;
    std::cout << a + k << ',' << status_name(st.status) << ','
              << (st.detector_time ? format_double(*st.detector_time) : "") << ','
              << format_double(st.max_state_norm) << ',' << outcomes[k].seconds << '\n';
    if (st.status == RunStatus::kDiverged) code = std::max(code, 3);
  }
  return code;
}

int cmd_diagnose(const std::string& path, const std::string& weights_csv) {
  const RunConfig cfg = load_config(path);
  LearnerState w = initial_weights(cfg.game, cfg.sim.init);
  std::string source = "initial";
  if (!weights_csv.empty()) {
    const Trajectory traj = read_trajectory(weights_csv);
    if (traj.rows.empty()) throw ConfigError("trajectory '" + weights_csv + "' has no rows");
    if (!(traj.layout == TrajectoryLayout::of(cfg.game)))
      throw ConfigError("trajectory layout does not match the configured game");
    const TrajectoryRow& last = traj.rows.back();
    w.Wv = last.Wv;
    w.Wa = last.Wa;
    w.Wnu = last.Wnu;
    source = "trajectory t=" + format_double(last.t);
  }
  const StabilityReport r = stability_report(cfg.game, cfg.tuning, w, cfg.diag.samples, cfg.diag.seed);
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  std::cout << "weights " << source << "\n"
            << "estimate_substituted " << r.estimate_substituted << "\n"
            << "grad_epsilon_zeroed " << r.grad_epsilon_zeroed << "\n"
            << "samples " << r.samples << "\n"
            << "lambda_m " << format_double(r.lambda_m) << "\n"
            << "Lambda_m " << format_double(r.Lambda_m) << "\n"
            << "Upsilon_m " << format_double(r.Upsilon_m) << "\n"
            << "S_m " << format_double(r.S_m) << "\n"
            << "pd " << r.pd << "\n"
            << "radicand_ok " << r.radicand_ok << "\n"
            << "r1 " << opt(r.r1) << "\n"
            << "r2 " << opt(r.r2) << "\n"
            << "ub_threshold " << opt(r.ub_threshold) << "\n\n"
            << "lambda_m,Lambda_m,Upsilon_m,S_m,pd,radicand_ok,r1,r2,ub_threshold\n"
            << format_double(r.lambda_m) << ',' << format_double(r.Lambda_m) << ','
            << format_double(r.Upsilon_m) << ',' << format_double(r.S_m) << ',' << r.pd << ','
            << r.radicand_ok << ',' << opt(r.r1) << ',' << opt(r.r2) << ','
            << opt(r.ub_threshold) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online actor-critic solver for leader-follower differential games"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed;
  auto* sim = app.add_subcommand("simulate", "Run one simulation and write CSV + manifest");
  sim->add_option("config", config_path, "JSON config or run manifest")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--seed", seed, "Run seed; re-derives every random stream");

  auto* ver = app.add_subcommand("verify", "Run every derivative and solver oracle");
  std::uint64_t verify_seed = 2024;
  ver->add_option("--seed", verify_seed, "Seed for the random instances");

  std::string weights_csv;
  auto* diag = app.add_subcommand("diagnose", "Stability diagnostics for a configuration");
  diag->add_option("config", config_path, "JSON config")->required();
  diag->add_option("--weights", weights_csv, "Use the last row of a trajectory CSV as weights");

  std::string seeds;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run a range of seeds");
  sweep->add_option("config", config_path, "JSON config")->required();
  sweep->add_option("--seeds", seeds, "Inclusive range a..b")->required();
  sweep->add_option("--out", out_dir, "Output directory (one subdirectory per seed)");
  sweep->add_option("--jobs", jobs, "Parallel runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config_path, out_dir, seed);
    if (*ver) {
      VerifyOptions opts;
      opts.seed = verify_seed;
      const VerifyReport rep = cmd_verify(opts);
      std::cout << format_report(rep);
      return rep.all_passed() ? 0 : 1;
    }
    if (*diag) return cmd_diagnose(config_path, weights_csv);
    if (*sweep) return cmd_sweep(config_path, seeds, out_dir, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
