// Acceptance suite: every gate prints one PASS/FAIL line; the process exit
// code is the number of failed gates. The DDPG-vs-DQN comparison is reported
// as a soft alarm only.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "mecsim/checks.hpp"
#include "mecsim/harness.hpp"

using namespace mecsim;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void warn(int criterion, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d (%s, reported, not gated): %s\n", ok ? "OK" : "WARN", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double x) { return format_double(x); }

std::string scratch_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("mecsim_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

Table drop_wall(const Table& t) {
  int idx = -1;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "wall_s") idx = static_cast<int>(i);
  }
  Table out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (static_cast<int>(i) != idx) out.header.push_back(t.header[i]);
  }
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (static_cast<int>(i) != idx) r.push_back(row[i]);
    }
    out.rows.push_back(r);
  }
  return out;
}

std::vector<double> column_for_policy(const Table& t, const std::string& policy) {
  std::vector<double> out;
  for (const auto& row : t.rows) {
    if (row[2] == policy) out.push_back(std::stod(row[3]));
  }
  return out;
}

std::vector<std::string> raw_column_for_policy(const Table& t, const std::string& policy) {
  std::vector<std::string> out;
  for (const auto& row : t.rows) {
    if (row[2] == policy) out.push_back(row[3]);
  }
  return out;
}

}  // namespace

int main() {
  const std::uint64_t seed = 20240911;
  SolverSettings settings;

  // 1. Alternating solver against the exhaustive grid oracle.
  {
    const CheckOutcome r = check_oracle_dominance(settings, 200, seed);
    report(1, r.pass, "solver vs oracle", r.detail);
  }
  // 2. Shared-budget equal-finish and energy residuals.
  {
    const CheckOutcome r = check_scenario2_residuals(200, seed);
    report(2, r.pass, "shared-budget residuals", r.detail);
  }
  // 3. Backpropagation against central finite differences.
  {
    const CheckOutcome r = check_gradients(50, seed);
    report(3, r.pass, "gradient correctness", r.detail);
  }
  // 4. Energy feasibility of projected actions and solver outputs.
  {
    const CheckOutcome r = check_energy_feasibility(500, seed);
    report(4, r.pass, "energy feasibility", r.detail);
  }
  // 8. Channel chain statistics (cheap, so run before the trainings).
  {
    const CheckOutcome r = check_channel_chain(seed);
    report(8, r.pass, "channel chain", r.detail);
  }

  // 5. Learning efficacy on the stock scenario with fixed seeds.
  double dqn_delay = 0.0, ddpg_delay = 0.0;
  {
    ExperimentConfig cfg;
    cfg.episodes = 300;
    cfg.slots = 200;
    cfg.eval_episodes = 20;
    cfg.env_seed = 1;
    cfg.agent_seed = 2;

    ExperimentConfig dqn_cfg = cfg;
    dqn_cfg.policy = PolicyKind::dqn;
    dqn_cfg.out_dir = scratch_dir("dqn");
    double t0 = now_s();
    const TrainingResult dqn_run = run_training(dqn_cfg);
    const double dqn_train_s = now_s() - t0;

    ExperimentConfig ddpg_cfg = cfg;
    ddpg_cfg.policy = PolicyKind::ddpg;
    ddpg_cfg.out_dir = scratch_dir("ddpg");
    t0 = now_s();
    const TrainingResult ddpg_run = run_training(ddpg_cfg);
    const double ddpg_train_s = now_s() - t0;

    const EvalResult dqn_eval = run_eval(cfg, PolicyKind::dqn, dqn_run.checkpoint_prefix);
    const EvalResult ddpg_eval = run_eval(cfg, PolicyKind::ddpg, ddpg_run.checkpoint_prefix);
    const EvalResult rnd = run_eval(cfg, PolicyKind::random_alloc);
    const EvalResult loc = run_eval(cfg, PolicyKind::local_only);
    const EvalResult mec = run_eval(cfg, PolicyKind::mec_only);
    dqn_delay = dqn_eval.mean_delay;
    ddpg_delay = ddpg_eval.mean_delay;

    const double bar = std::min(loc.mean_delay, mec.mean_delay);
    const bool dqn_ok = dqn_delay <= 0.9 * rnd.mean_delay && dqn_delay <= bar &&
                        dqn_train_s < 600.0;
    const bool ddpg_ok = ddpg_delay <= 0.9 * rnd.mean_delay && ddpg_delay <= bar &&
                         ddpg_train_s < 600.0;
    report(5, dqn_ok && ddpg_ok, "learning efficacy",
           "dqn " + fmt(dqn_delay) + " s (train " + fmt(dqn_train_s) + " s), ddpg " +
               fmt(ddpg_delay) + " s (train " + fmt(ddpg_train_s) + " s), random " +
               fmt(rnd.mean_delay) + ", local_only " + fmt(loc.mean_delay) + ", mec_only " +
               fmt(mec.mean_delay));

    // 7. Paired-seed comparison, reported but not gated.
    const double ratio = ddpg_delay / dqn_delay;
    warn(7, ratio <= 1.1, "ddpg vs dqn",
         "ddpg/dqn mean delay ratio " + fmt(ratio) + " (soft alarm above 1.1)");
  }

  // 6. Trend reproduction across task rate and server capability.
  {
    ExperimentConfig cfg;
    cfg.eval_episodes = 10;
    cfg.slots = 100;
    cfg.env_seed = 1;
    cfg.agent_seed = 2;

    // Task-rate sweep on a narrow subchannel, where transmission is the
    // bottleneck and the offload-everything policy loses at light loads.
    ExperimentConfig rate_cfg = cfg;
    rate_cfg.network.B = 5e4;
    const std::vector<double> rates = {0.5e6, 1e6, 2e6, 3e6, 4.5e6, 6e6};
    const std::vector<std::string> policies = {"random", "local_only", "mec_only"};
    const Table rate_table = sweep(rate_cfg, SweepAxis::task_rate, rates, policies);

    bool monotone = true;
    std::string bad_policy;
    for (const std::string& pol : policies) {
      const std::vector<double> d = column_for_policy(rate_table, pol);
      for (std::size_t i = 1; i < d.size(); ++i) {
        if (d[i] < d[i - 1] * (1.0 - 1e-12)) {
          monotone = false;
          bad_policy = pol;
        }
      }
    }
    report(6, monotone, "delay grows with the task rate",
           monotone ? "all policies non-decreasing over " + std::to_string(rates.size()) +
                          " rates"
                    : "violated by " + bad_policy);

    const std::vector<double> rnd_d = column_for_policy(rate_table, "random");
    const std::vector<double> mec_d = column_for_policy(rate_table, "mec_only");
    bool saw_rnd_win = false, saw_mec_win = false;
    for (std::size_t i = 0; i < rnd_d.size(); ++i) {
      if (rnd_d[i] < mec_d[i]) saw_rnd_win = true;
      if (mec_d[i] < rnd_d[i]) saw_mec_win = true;
    }
    report(6, saw_rnd_win && saw_mec_win, "random vs offload-everything crossover",
           "random wins at some rate: " + std::string(saw_rnd_win ? "yes" : "no") +
               ", offload-everything wins at some rate: " +
               std::string(saw_mec_win ? "yes" : "no"));

    // Server-capability sweep on the stock scenario.
    const Table cap_table = sweep(cfg, SweepAxis::mec_capability, {0.25, 0.5, 1.0, 2.0, 4.0},
                                  {"random", "local_only", "mec_only"});
    const std::vector<std::string> loc_rows = raw_column_for_policy(cap_table, "local_only");
    bool local_const = true;
    for (const std::string& v : loc_rows) local_const = local_const && (v == loc_rows[0]);
    const std::vector<double> mec_rows = column_for_policy(cap_table, "mec_only");
    bool mec_mono = true;
    for (std::size_t i = 1; i < mec_rows.size(); ++i) {
      if (mec_rows[i] > mec_rows[i - 1] * (1.0 + 1e-12)) mec_mono = false;
    }
    report(6, local_const && mec_mono, "server-capability sweep",
           "local computing constant: " + std::string(local_const ? "yes" : "no") +
               ", offload-everything non-increasing: " + std::string(mec_mono ? "yes" : "no"));

    // keep the artifacts around for inspection
    const std::string out = scratch_dir("sweeps");
    emit_csv(rate_table, out + "/sweep_task_rate.csv");
    emit_plot(rate_table, out + "/sweep_task_rate.svg");
    emit_csv(cap_table, out + "/sweep_mec_capability.csv");
    emit_plot(cap_table, out + "/sweep_mec_capability.svg");
    std::printf("       sweep artifacts in %s\n", out.c_str());
  }

  // 9. Byte-level determinism of the training metrics.
  {
    ExperimentConfig cfg;
    cfg.policy = PolicyKind::dqn;
    cfg.episodes = 4;
    cfg.slots = 25;
    cfg.out_dir = scratch_dir("det_a");
    const TrainingResult a = run_training(cfg);
    cfg.out_dir = scratch_dir("det_b");
    const TrainingResult b = run_training(cfg);
    const Table ta = drop_wall(parse_csv(a.metrics_path));
    const Table tb = drop_wall(parse_csv(b.metrics_path));
    const bool same = ta.header == tb.header && ta.rows == tb.rows;
    report(9, same, "training determinism",
           same ? "metrics identical outside the wall-time column"
                : "metrics differ between identical runs");
  }

  std::printf("%d gated criterion failure(s)\n", failures);
  return failures;
}
