#pragma once

#include <cstdint>
#include <vector>

#include "mecsim/config.hpp"
#include "mecsim/env.hpp"
#include "mecsim/nn.hpp"
#include "mecsim/ratemodel.hpp"
#include "mecsim/solver.hpp"
#include "mecsim/toml.hpp"

namespace mecsim {

// Normalized flattening of an observation: the M*K delayed gains scaled by the
// mean path gain (row-major over servers, then users), followed by the K task
// sizes scaled by C_mean.
std::vector<double> build_features(const Observation& obs, const NetworkConfig& cfg);

struct DqnAgentConfig {
  double eps_start = 1.0;
  double eps_end = 0.05;
  long eps_decay_steps = 10000;
  double gamma = 0.95;
  long target_sync_period = 200;  // hard target copy every this many steps
  double lr = 0.01;
  int minibatch = 64;
  std::size_t buffer_capacity = 50000;
  std::vector<int> hidden = {64, 64};
  double reward_scale = 1000.0;  // applied to stored rewards; 1/tau0 by default

  void validate() const;
  static DqnAgentConfig from_toml(const TomlDoc& doc);
};

struct DqnAgent {
  DqnAgentConfig cfg;
  int M = 0, K = 0;
  long action_count = 0;
  Rng rng;
  Mlp q, q_target;
  AdamState opt;
  ReplayBuffer buffer;
  long steps_done = 0;

  DqnAgent(const NetworkConfig& net_cfg, const DqnAgentConfig& agent_cfg, std::uint64_t seed);
  double epsilon() const;
};

// Epsilon-greedy over the joint assignment index; ties resolve to the lowest.
int dqn_select_action(const Mlp& qnet, const std::vector<double>& features, double epsilon,
                      Rng& rng);

// Mixed-radix decoding of a joint assignment index: user k takes base-M digit k.
std::vector<int> decode_assignment(long index, int M, int K);
long encode_assignment(const std::vector<int>& assignment, int M);

struct SlotResult {
  double slot_delay = 0.0;
  double reward = 0.0;
};

// One interaction slot: act on delayed features, price the action with the
// per-assignment solver on current gains, store the transition, learn.
SlotResult dqn_train_step(DqnAgent& agent, EnvState& env, const NetworkConfig& cfg,
                          const SolverSettings& solver);
// One optimization step on an explicit batch; returns the batch loss.
double dqn_update_batch(DqnAgent& agent, const std::vector<Transition>& batch);

struct DdpgAgentConfig {
  double gamma = 0.95;
  double tau = 0.005;
  double sigma = 0.1;  // exploration noise scale per action dimension
  double actor_lr = 0.001;
  double critic_lr = 0.001;
  double grad_clip = 1.0;  // global-norm gradient clip for both networks
  long warmup_steps = 2000;  // uniform-random actions before the policy acts
  int minibatch = 64;
  std::size_t buffer_capacity = 50000;
  std::vector<int> hidden = {64, 64};
  double reward_scale = 1000.0;

  void validate() const;
  static DdpgAgentConfig from_toml(const TomlDoc& doc);
};

struct DdpgAgent {
  DdpgAgentConfig cfg;
  int M = 0, K = 0;
  int action_dim = 0;  // K * (3 + M), per user [alpha, u_local, u_tx, u_mec(M)]
  Rng rng;
  Mlp actor, actor_target, critic, critic_target;
  AdamState opt_actor, opt_critic;
  ReplayBuffer buffer;
  long steps_done = 0;

  DdpgAgent(const NetworkConfig& net_cfg, const DdpgAgentConfig& agent_cfg, std::uint64_t seed);
};

// Actor output plus Gaussian noise, clamped to [0, 1] per dimension.
std::vector<double> ddpg_select_action(const Mlp& actor, const std::vector<double>& features,
                                       double sigma, Rng& rng);

// Maps a raw action in [0,1]^{K(3+M)} to a feasible decision: argmax server
// selection, split ratio taken directly, the user budget divided between local
// and transmit by u_local/(u_local+u_tx), and each server budget divided among
// its offloading users proportionally to their winning selector values. Powers
// come from the budget-activating closed forms, so every budget is respected.
// Transmit powers are sized against the observation's (delayed) gains, the
// only channel information a decision may use.
ControlDecision project_action(const std::vector<double>& raw, const Observation& obs,
                               const NetworkConfig& cfg, double tol = 1e-10);

SlotResult ddpg_train_step(DdpgAgent& agent, EnvState& env, const NetworkConfig& cfg);
// One critic + actor step on an explicit batch; returns the critic loss.
// The actor and the target nets hold still while update_actor is false, which
// the training step uses during warmup so the young critic cannot saturate
// the policy.
double ddpg_update_batch(DdpgAgent& agent, const std::vector<Transition>& batch,
                         bool update_actor = true);

// Checkpoint helpers using the role-suffix naming (<prefix>.q.ckpt etc).
void save_dqn_checkpoint(const DqnAgent& agent, const std::string& prefix);
void load_dqn_checkpoint(DqnAgent& agent, const std::string& prefix);
void save_ddpg_checkpoint(const DdpgAgent& agent, const std::string& prefix);
void load_ddpg_checkpoint(DdpgAgent& agent, const std::string& prefix);

}  // namespace mecsim
