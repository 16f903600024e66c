#include "mecsim/env.hpp"

#include "mecsim/errors.hpp"

namespace mecsim {

namespace {

// One chain transition for a single link.
int step_state(int s, int L, double rho, Rng& rng) {
  const double u = rng.uniform01();
  if (u < rho) return s;
  const double half = rho + 0.5 * (1.0 - rho);
  if (u < half) return (s > 0) ? s - 1 : s;
  return (s < L - 1) ? s + 1 : s;
}

}  // namespace

std::vector<std::vector<double>> transition_matrix(const NetworkConfig& cfg) {
  const int L = cfg.L;
  const double rho = cfg.rho;
  const double move = 0.5 * (1.0 - rho);
  std::vector<std::vector<double>> P(L, std::vector<double>(L, 0.0));
  for (int i = 0; i < L; ++i) {
    P[i][i] = rho;
    if (i > 0) P[i][i - 1] = move; else P[i][i] += move;
    if (i < L - 1) P[i][i + 1] = move; else P[i][i] += move;
  }
  return P;
}

EnvState init_env(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  EnvState st;
  st.t = 0;
  st.rng = Rng(seed);
  st.channels_prev.states = Grid<int>(cfg.M, cfg.K);
  st.channels_now.states = Grid<int>(cfg.M, cfg.K);
  // The reflecting chain is uniform in steady state, so a uniform draw is a
  // stationary start; channels_now is that start advanced by one transition.
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      st.channels_prev.states.at(m, k) = st.rng.uniform_int(cfg.L);
    }
  }
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      st.channels_now.states.at(m, k) =
          step_state(st.channels_prev.states.at(m, k), cfg.L, cfg.rho, st.rng);
    }
  }
  st.tasks = sample_tasks(cfg, st.rng);
  return st;
}

void step_channels(EnvState& state, const NetworkConfig& cfg) {
  if (state.channels_now.states.rows != cfg.M || state.channels_now.states.cols != cfg.K)
    throw ContractError("step_channels: state does not match config dimensions");
  ChannelState next;
  next.states = Grid<int>(cfg.M, cfg.K);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      next.states.at(m, k) =
          step_state(state.channels_now.states.at(m, k), cfg.L, cfg.rho, state.rng);
    }
  }
  state.channels_prev = state.channels_now;
  state.channels_now = next;
  state.t += 1;
}

TaskVector sample_tasks(const NetworkConfig& cfg, Rng& rng) {
  TaskVector tasks(cfg.K);
  const double lo = cfg.C_mean * (1.0 - cfg.C_spread);
  const double hi = cfg.C_mean * (1.0 + cfg.C_spread);
  for (int k = 0; k < cfg.K; ++k) tasks[k] = rng.uniform(lo, hi);
  return tasks;
}

Observation observe(const EnvState& state, const NetworkConfig& cfg) {
  Observation obs;
  obs.h_prev = Grid<double>(cfg.M, cfg.K);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      const int s = state.channels_prev.states.at(m, k);
      if (s < 0 || s >= cfg.L) throw ContractError("observe: channel state index out of range");
      obs.h_prev.at(m, k) = cfg.gain_levels[s];
    }
  }
  obs.C_now = state.tasks;
  return obs;
}

void advance(EnvState& state, const NetworkConfig& cfg) {
  step_channels(state, cfg);
  state.tasks = sample_tasks(cfg, state.rng);
}

Grid<double> current_gains(const EnvState& state, const NetworkConfig& cfg) {
  Grid<double> g(cfg.M, cfg.K);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      g.at(m, k) = cfg.gain_levels[state.channels_now.states.at(m, k)];
    }
  }
  return g;
}

}  // namespace mecsim
