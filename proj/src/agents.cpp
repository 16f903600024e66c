#include "mecsim/agents.hpp"

#include <algorithm>
#include <cmath>

#include "mecsim/errors.hpp"

namespace mecsim {

std::vector<double> build_features(const Observation& obs, const NetworkConfig& cfg) {
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(cfg.M) * cfg.K + cfg.K);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) f.push_back(obs.h_prev.at(m, k) / cfg.g0);
  }
  for (int k = 0; k < cfg.K; ++k) f.push_back(obs.C_now[k] / cfg.C_mean);
  return f;
}

namespace {

long int_pow(int base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > (1L << 20)) throw ConfigError("assignment action space is too large (M^K)");
  }
  return r;
}

std::vector<int> feature_to_dims(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  return dims;
}

}  // namespace

void DqnAgentConfig::validate() const {
  if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0))
    throw ConfigError("dqn config: epsilon bounds must be in [0, 1]");
  if (eps_decay_steps < 1) throw ConfigError("dqn config: eps_decay_steps must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("dqn config: gamma must be in [0, 1)");
  if (target_sync_period < 1) throw ConfigError("dqn config: target_sync_period must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("dqn config: lr must be > 0");
  if (minibatch < 1) throw ConfigError("dqn config: minibatch must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(minibatch))
    throw ConfigError("dqn config: buffer capacity below the minibatch size");
  if (!(reward_scale > 0.0)) throw ConfigError("dqn config: reward_scale must be > 0");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("dqn config: hidden widths must be positive");
  }
}

DqnAgentConfig DqnAgentConfig::from_toml(const TomlDoc& doc) {
  DqnAgentConfig c;
  SectionReader r(doc, "dqn");
  c.eps_start = r.get_double("eps_start", c.eps_start);
  c.eps_end = r.get_double("eps_end", c.eps_end);
  c.eps_decay_steps = r.get_int("eps_decay_steps", c.eps_decay_steps);
  c.gamma = r.get_double("gamma", c.gamma);
  c.target_sync_period = r.get_int("target_sync_period", c.target_sync_period);
  c.lr = r.get_double("lr", c.lr);
  c.minibatch = static_cast<int>(r.get_int("minibatch", c.minibatch));
  c.buffer_capacity =
      static_cast<std::size_t>(r.get_int("buffer_capacity", static_cast<long>(c.buffer_capacity)));
  c.reward_scale = r.get_double("reward_scale", c.reward_scale);
  if (r.has("hidden")) {
    c.hidden.clear();
    for (double h : r.get_array("hidden", {})) c.hidden.push_back(static_cast<int>(h));
  }
  r.finish();
  c.validate();
  return c;
}

DqnAgent::DqnAgent(const NetworkConfig& net_cfg, const DqnAgentConfig& agent_cfg,
                   std::uint64_t seed)
    : cfg(agent_cfg),
      M(net_cfg.M),
      K(net_cfg.K),
      action_count(int_pow(net_cfg.M, net_cfg.K)),
      rng(derive_seed(seed, stream::agent)),
      q(feature_to_dims(net_cfg.M * net_cfg.K + net_cfg.K, agent_cfg.hidden,
                        static_cast<int>(action_count)),
        OutputActivation::identity, rng),
      q_target(q),
      opt(q, agent_cfg.lr),
      buffer(agent_cfg.buffer_capacity) {
  cfg.validate();
}

double DqnAgent::epsilon() const {
  const double frac =
      std::min(1.0, static_cast<double>(steps_done) / static_cast<double>(cfg.eps_decay_steps));
  return cfg.eps_end + (cfg.eps_start - cfg.eps_end) * (1.0 - frac);
}

int dqn_select_action(const Mlp& qnet, const std::vector<double>& features, double epsilon,
                      Rng& rng) {
  const int n = qnet.output_dim();
  if (epsilon > 0.0 && rng.uniform01() < epsilon) return rng.uniform_int(n);
  const std::vector<double> qv = forward(qnet, features);
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (qv[i] > qv[best]) best = i;
  }
  return best;
}

std::vector<int> decode_assignment(long index, int M, int K) {
  if (index < 0 || index >= int_pow(M, K))
    throw ContractError("decode_assignment: index out of range");
  std::vector<int> a(K);
  for (int k = 0; k < K; ++k) {
    a[k] = static_cast<int>(index % M);
    index /= M;
  }
  return a;
}

long encode_assignment(const std::vector<int>& assignment, int M) {
  long idx = 0;
  long radix = 1;
  for (int digit : assignment) {
    if (digit < 0 || digit >= M) throw ContractError("encode_assignment: digit out of range");
    idx += digit * radix;
    radix *= M;
  }
  return idx;
}

double dqn_update_batch(DqnAgent& agent, const std::vector<Transition>& batch) {
  Gradients acc = Gradients::zeros_like(agent.q);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  ForwardCache cache;
  for (const Transition& tr : batch) {
    const std::vector<double> q2 = forward(agent.q_target, tr.s2);
    const double max_q2 = *std::max_element(q2.begin(), q2.end());
    const double y = tr.r + agent.cfg.gamma * max_q2;  // continuing task, no terminals
    const std::vector<double> qv = forward(agent.q, tr.s, &cache);
    const int a = static_cast<int>(std::llround(tr.a[0]));
    const double diff = qv[a] - y;
    loss += diff * diff * inv_n;
    std::vector<double> go(qv.size(), 0.0);
    go[a] = 2.0 * diff * inv_n;
    backward_acc(agent.q, cache, go, &acc, nullptr);
  }
  adam_step(agent.opt, agent.q, acc);
  return loss;
}

SlotResult dqn_train_step(DqnAgent& agent, EnvState& env, const NetworkConfig& cfg,
                          const SolverSettings& solver) {
  const Observation obs = observe(env, cfg);
  const std::vector<double> s = build_features(obs, cfg);
  const int action = dqn_select_action(agent.q, s, agent.epsilon(), agent.rng);
  const std::vector<int> assignment = decode_assignment(action, agent.M, agent.K);

  // Reward side: the servers know the current slot, the agent does not.
  const auto [decision, report] =
      solve_assignment(assignment, current_gains(env, cfg), env.tasks, cfg, solver);
  (void)decision;

  advance(env, cfg);
  const std::vector<double> s2 = build_features(observe(env, cfg), cfg);
  agent.buffer.push({s, {static_cast<double>(action)}, report.reward * agent.cfg.reward_scale, s2});

  if (agent.buffer.size() >= static_cast<std::size_t>(agent.cfg.minibatch)) {
    dqn_update_batch(agent, agent.buffer.sample(agent.cfg.minibatch, agent.rng));
  }
  agent.steps_done += 1;
  if (agent.steps_done % agent.cfg.target_sync_period == 0) {
    hard_update(agent.q_target, agent.q);
  }
  return {report.slot_delay, report.reward};
}

void DdpgAgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("ddpg config: gamma must be in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("ddpg config: tau must be in (0, 1]");
  if (sigma < 0.0) throw ConfigError("ddpg config: sigma must be >= 0");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0))
    throw ConfigError("ddpg config: learning rates must be > 0");
  if (!(grad_clip > 0.0)) throw ConfigError("ddpg config: grad_clip must be > 0");
  if (warmup_steps < 0) throw ConfigError("ddpg config: warmup_steps must be >= 0");
  if (minibatch < 1) throw ConfigError("ddpg config: minibatch must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(minibatch))
    throw ConfigError("ddpg config: buffer capacity below the minibatch size");
  if (!(reward_scale > 0.0)) throw ConfigError("ddpg config: reward_scale must be > 0");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("ddpg config: hidden widths must be positive");
  }
}

DdpgAgentConfig DdpgAgentConfig::from_toml(const TomlDoc& doc) {
  DdpgAgentConfig c;
  SectionReader r(doc, "ddpg");
  c.gamma = r.get_double("gamma", c.gamma);
  c.tau = r.get_double("tau", c.tau);
  c.sigma = r.get_double("sigma", c.sigma);
  c.actor_lr = r.get_double("actor_lr", c.actor_lr);
  c.critic_lr = r.get_double("critic_lr", c.critic_lr);
  c.grad_clip = r.get_double("grad_clip", c.grad_clip);
  c.warmup_steps = r.get_int("warmup_steps", c.warmup_steps);
  c.minibatch = static_cast<int>(r.get_int("minibatch", c.minibatch));
  c.buffer_capacity =
      static_cast<std::size_t>(r.get_int("buffer_capacity", static_cast<long>(c.buffer_capacity)));
  c.reward_scale = r.get_double("reward_scale", c.reward_scale);
  if (r.has("hidden")) {
    c.hidden.clear();
    for (double h : r.get_array("hidden", {})) c.hidden.push_back(static_cast<int>(h));
  }
  r.finish();
  c.validate();
  return c;
}

DdpgAgent::DdpgAgent(const NetworkConfig& net_cfg, const DdpgAgentConfig& agent_cfg,
                     std::uint64_t seed)
    : cfg(agent_cfg),
      M(net_cfg.M),
      K(net_cfg.K),
      action_dim(net_cfg.K * (3 + net_cfg.M)),
      rng(derive_seed(seed, stream::agent)),
      actor(feature_to_dims(net_cfg.M * net_cfg.K + net_cfg.K, agent_cfg.hidden, action_dim),
            OutputActivation::sigmoid, rng),
      actor_target(actor),
      critic(feature_to_dims(net_cfg.M * net_cfg.K + net_cfg.K + action_dim, agent_cfg.hidden, 1),
             OutputActivation::identity, rng),
      critic_target(critic),
      opt_actor(actor, agent_cfg.actor_lr),
      opt_critic(critic, agent_cfg.critic_lr),
      buffer(agent_cfg.buffer_capacity) {
  cfg.validate();
}

std::vector<double> ddpg_select_action(const Mlp& actor, const std::vector<double>& features,
                                       double sigma, Rng& rng) {
  std::vector<double> a = forward(actor, features);
  if (sigma > 0.0) {
    for (double& v : a) v = std::clamp(v + sigma * rng.gaussian(), 0.0, 1.0);
  }
  return a;
}

ControlDecision project_action(const std::vector<double>& raw, const Observation& obs,
                               const NetworkConfig& cfg, double tol) {
  const int M = cfg.M, K = cfg.K;
  const int per_user = 3 + M;
  if (static_cast<int>(raw.size()) != K * per_user)
    throw ContractError("project_action: raw action size mismatch");
  for (double v : raw) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
      throw ContractError("project_action: raw entries must lie in [0, 1]");
  }

  ControlDecision d = ControlDecision::zeros(M, K);
  for (int k = 0; k < K; ++k) {
    const int base = k * per_user;
    const double alpha = std::clamp(raw[base], 0.0, 1.0);
    const double u_loc = raw[base + 1];
    const double u_tx = raw[base + 2];
    int server = 0;
    for (int m = 1; m < M; ++m) {
      if (raw[base + 3 + m] > raw[base + 3 + server]) server = m;
    }
    d.assignment[k] = server;
    d.alpha[k] = alpha;

    const double C = obs.C_now[k];
    const double load_local = alpha * C;
    const double load_off = (1.0 - alpha) * C;
    const double frac_local = (u_loc + u_tx > 0.0) ? u_loc / (u_loc + u_tx) : 0.5;
    const double E_loc = frac_local * cfg.E_max_user;
    const double E_tx = (1.0 - frac_local) * cfg.E_max_user;
    if (load_local > 0.0 && E_loc > 0.0)
      d.p_local[k] = local_power_closed_form(alpha, C, E_loc, cfg.kappa_u, cfg.D_k);
    if (load_off > 0.0 && E_tx > 0.0)
      d.p_tx[k] = solve_transmit_power(alpha, C, obs.h_prev.at(server, k), E_tx, cfg.B, cfg.N0,
                                       tol);
  }

  // Server budgets go to the members that actually offload, split by their
  // winning selector values.
  for (int m = 0; m < M; ++m) {
    std::vector<int> members;
    double weight_sum = 0.0;
    for (int k = 0; k < K; ++k) {
      if (d.assignment[k] != m) continue;
      if ((1.0 - d.alpha[k]) * obs.C_now[k] <= 0.0) continue;
      members.push_back(k);
      weight_sum += raw[k * per_user + 3 + m];
    }
    for (int k : members) {
      const double w = (weight_sum > 0.0)
                           ? raw[k * per_user + 3 + m] / weight_sum
                           : 1.0 / static_cast<double>(members.size());
      const double share = w * cfg.E_max_mec;
      if (share > 0.0)
        d.p_mec.at(m, k) =
            mec_power_closed_form(d.alpha[k], obs.C_now[k], share, cfg.kappa_m, cfg.D_m);
    }
  }
  return d;
}

double ddpg_update_batch(DdpgAgent& agent, const std::vector<Transition>& batch,
                         bool update_actor) {
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const int state_dim = agent.critic.input_dim() - agent.action_dim;

  // Critic regression toward the bootstrapped target.
  Gradients gc = Gradients::zeros_like(agent.critic);
  double loss = 0.0;
  ForwardCache cache;
  std::vector<double> x;
  for (const Transition& tr : batch) {
    const std::vector<double> a2 = forward(agent.actor_target, tr.s2);
    x = tr.s2;
    x.insert(x.end(), a2.begin(), a2.end());
    const double q2 = forward(agent.critic_target, x)[0];
    const double y = tr.r + agent.cfg.gamma * q2;

    x = tr.s;
    x.insert(x.end(), tr.a.begin(), tr.a.end());
    const double qv = forward(agent.critic, x, &cache)[0];
    const double diff = qv - y;
    loss += diff * diff * inv_n;
    backward_acc(agent.critic, cache, {2.0 * diff * inv_n}, &gc, nullptr);
  }
  clip_gradients(gc, agent.cfg.grad_clip);
  adam_step(agent.opt_critic, agent.critic, gc);
  if (!update_actor) return loss;

  // Actor ascends the critic through the chain rule on the action slice.
  Gradients ga = Gradients::zeros_like(agent.actor);
  ForwardCache actor_cache;
  std::vector<double> input_grad;
  for (const Transition& tr : batch) {
    const std::vector<double> a = forward(agent.actor, tr.s, &actor_cache);
    x = tr.s;
    x.insert(x.end(), a.begin(), a.end());
    (void)forward(agent.critic, x, &cache);
    backward_acc(agent.critic, cache, {1.0}, nullptr, &input_grad);
    std::vector<double> dq_da(input_grad.begin() + state_dim, input_grad.end());
    for (double& v : dq_da) v *= -inv_n;  // minimize -Q
    backward_acc(agent.actor, actor_cache, dq_da, &ga, nullptr);
  }
  clip_gradients(ga, agent.cfg.grad_clip);
  adam_step(agent.opt_actor, agent.actor, ga);

  soft_update(agent.actor_target, agent.actor, agent.cfg.tau);
  soft_update(agent.critic_target, agent.critic, agent.cfg.tau);
  return loss;
}

SlotResult ddpg_train_step(DdpgAgent& agent, EnvState& env, const NetworkConfig& cfg) {
  const Observation obs = observe(env, cfg);
  const std::vector<double> s = build_features(obs, cfg);
  // uniform actions during warmup give the critic coverage of the whole box
  std::vector<double> raw;
  if (agent.steps_done < agent.cfg.warmup_steps) {
    raw.resize(agent.action_dim);
    for (double& v : raw) v = agent.rng.uniform01();
  } else {
    raw = ddpg_select_action(agent.actor, s, agent.cfg.sigma, agent.rng);
  }
  const ControlDecision decision = project_action(raw, obs, cfg);
  const DelayReport report = evaluate(decision, env.tasks, current_gains(env, cfg), cfg);

  advance(env, cfg);
  const std::vector<double> s2 = build_features(observe(env, cfg), cfg);
  agent.buffer.push({s, raw, report.reward * agent.cfg.reward_scale, s2});

  if (agent.buffer.size() >= static_cast<std::size_t>(agent.cfg.minibatch)) {
    const bool past_warmup = agent.steps_done >= agent.cfg.warmup_steps;
    ddpg_update_batch(agent, agent.buffer.sample(agent.cfg.minibatch, agent.rng), past_warmup);
  }
  agent.steps_done += 1;
  return {report.slot_delay, report.reward};
}

void save_dqn_checkpoint(const DqnAgent& agent, const std::string& prefix) {
  save_checkpoint(agent.q, prefix + ".q.ckpt");
  save_checkpoint(agent.q_target, prefix + ".q_target.ckpt");
}

void load_dqn_checkpoint(DqnAgent& agent, const std::string& prefix) {
  load_checkpoint(agent.q, prefix + ".q.ckpt");
  load_checkpoint(agent.q_target, prefix + ".q_target.ckpt");
}

void save_ddpg_checkpoint(const DdpgAgent& agent, const std::string& prefix) {
  save_checkpoint(agent.actor, prefix + ".actor.ckpt");
  save_checkpoint(agent.actor_target, prefix + ".actor_target.ckpt");
  save_checkpoint(agent.critic, prefix + ".critic.ckpt");
  save_checkpoint(agent.critic_target, prefix + ".critic_target.ckpt");
}

void load_ddpg_checkpoint(DdpgAgent& agent, const std::string& prefix) {
  load_checkpoint(agent.actor, prefix + ".actor.ckpt");
  load_checkpoint(agent.actor_target, prefix + ".actor_target.ckpt");
  load_checkpoint(agent.critic, prefix + ".critic.ckpt");
  load_checkpoint(agent.critic_target, prefix + ".critic_target.ckpt");
}

}  // namespace mecsim
