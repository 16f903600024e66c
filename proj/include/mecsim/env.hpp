#pragma once

#include <cstdint>
#include <vector>

#include "mecsim/config.hpp"
#include "mecsim/rng.hpp"
#include "mecsim/types.hpp"

namespace mecsim {

// Task sizes in bits, one entry per user.
using TaskVector = std::vector<double>;

// Per-link channel state indices, one per (server, user) pair.
struct ChannelState {
  Grid<int> states;  // M x K, each in [0, L)
  bool operator==(const ChannelState&) const = default;
};

// Full simulator state for one time slot. channels_prev always holds the
// previous slot's channels_now once the environment has stepped.
struct EnvState {
  long t = 0;
  ChannelState channels_now;
  ChannelState channels_prev;
  TaskVector tasks;
  Rng rng{0};
  bool operator==(const EnvState&) const = default;
};

// What a decision maker is allowed to see: one-slot-delayed gains and the
// current task sizes. Carries nothing derived from channels_now.
struct Observation {
  Grid<double> h_prev;  // M x K gains
  TaskVector C_now;
};

// Per-state transition rows: stay with probability rho, otherwise move to a
// neighbouring state with equal probability, reflecting into place at the ends.
std::vector<std::vector<double>> transition_matrix(const NetworkConfig& cfg);

// Fresh environment: both channel grids start in the chain's stationary
// distribution (uniform for the reflecting chain above, with channels_now one
// transition ahead of channels_prev) and a first task vector is drawn.
// Identical (config, seed) pairs produce bit-identical states.
EnvState init_env(const NetworkConfig& cfg, std::uint64_t seed);

// Evolves every link independently by one chain transition and advances time.
void step_channels(EnvState& state, const NetworkConfig& cfg);

TaskVector sample_tasks(const NetworkConfig& cfg, Rng& rng);

Observation observe(const EnvState& state, const NetworkConfig& cfg);

// One slot boundary: channels evolve, then the next task vector arrives.
void advance(EnvState& state, const NetworkConfig& cfg);

// Current-slot gains; reserved for the reward path, never for decisions.
Grid<double> current_gains(const EnvState& state, const NetworkConfig& cfg);

}  // namespace mecsim
