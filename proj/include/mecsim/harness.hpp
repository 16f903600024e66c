#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mecsim/agents.hpp"
#include "mecsim/baselines.hpp"
#include "mecsim/config.hpp"
#include "mecsim/solver.hpp"

namespace mecsim {

// Policies the harness can train or evaluate. best_assignment enumerates every
// server assignment, solves each on current gains and keeps the cheapest; it
// is a reference upper baseline rather than a causal policy.
enum class PolicyKind { dqn, ddpg, random_alloc, local_only, mec_only, best_assignment };

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

struct ExperimentConfig {
  NetworkConfig network;
  SolverSettings solver;
  DqnAgentConfig dqn;
  DdpgAgentConfig ddpg;
  PolicyKind policy = PolicyKind::dqn;
  long episodes = 300;
  long slots = 200;
  std::uint64_t env_seed = 1;
  std::uint64_t agent_seed = 2;
  long eval_episodes = 20;
  std::string out_dir = "out";

  void validate() const;
  static ExperimentConfig from_toml_file(const std::string& path);
  static ExperimentConfig from_toml(const TomlDoc& doc);
  // Derives env/agent seeds from one base seed (CLI --seed).
  void apply_base_seed(std::uint64_t base);
};

struct MetricsRow {
  long episode = 0;
  double mean_delay = 0.0;   // s
  double mean_reward = 0.0;
  double exploration = 0.0;  // epsilon or sigma, 0 for baselines
  double wall_s = 0.0;
};

// Plain string table with CSV round-tripping (RFC 4180 quoting).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void emit_csv(const Table& table, const std::string& path);
Table parse_csv(const std::string& path);

// Standalone SVG line chart for a sweep table: one polyline per policy over
// (value, mean_delay_s). Throws on an empty table before creating the file.
void emit_plot(const Table& table, const std::string& path);

std::string format_double(double x);

struct TrainingResult {
  std::vector<MetricsRow> rows;
  std::string metrics_path;
  std::string checkpoint_prefix;  // empty for baseline rollouts
};

// Runs episodes x slots with a fresh environment per episode (seed derived
// from env_seed and the episode index); networks and the replay buffer
// persist across episodes. Writes metrics.csv and checkpoints to out_dir.
TrainingResult run_training(const ExperimentConfig& cfg);

// In-place variants used by the training entry point and by tests that need
// to inspect the agent afterwards.
std::vector<MetricsRow> train_dqn(DqnAgent& agent, const ExperimentConfig& cfg);
std::vector<MetricsRow> train_ddpg(DdpgAgent& agent, const ExperimentConfig& cfg);

struct EvalResult {
  double mean_delay = 0.0;
  double std_delay = 0.0;
  std::vector<double> per_episode;  // mean slot delay per evaluation episode
};

// Greedy, noise-free rollouts on evaluation seeds disjoint from training.
// checkpoint_prefix is required for dqn/ddpg and ignored otherwise.
EvalResult run_eval(const ExperimentConfig& cfg, PolicyKind kind,
                    const std::string& checkpoint_prefix = "");

enum class SweepAxis { task_rate, mec_capability };
SweepAxis sweep_axis_from_string(const std::string& name);

// Policy specs: a policy name, optionally "dqn=<prefix>"/"ddpg=<prefix>" to
// evaluate trained checkpoints across the sweep.
Table sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
            const std::vector<std::string>& policy_specs);

}  // namespace mecsim
