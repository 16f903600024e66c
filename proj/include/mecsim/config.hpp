#pragma once

#include <string>
#include <vector>

#include "mecsim/toml.hpp"

namespace mecsim {

// Static parameters of the offloading network. Defaults describe the stock
// two-user two-server scenario; every field can be overridden from the
// [network] section of a TOML config.
struct NetworkConfig {
  int M = 2;                  // MEC servers
  int K = 2;                  // users
  double B = 1e6;             // per-user subchannel bandwidth, Hz
  double N0 = 4e-15;          // noise power, W
  double kappa_u = 1e-27;     // user CPU coefficient, W s^3 / cycle^3
  double kappa_m = 1e-27;     // server CPU coefficient
  double D_k = 300.0;         // cycles per bit at the user
  double D_m = 120.0;         // cycles per bit at the server
  double E_max_user = 1e-4;   // per-slot user energy budget, J
  double E_max_mec = 1e-2;    // per-slot server energy budget, J
  double tau0 = 1e-3;         // slot length, s
  double C_mean = 2700.0;     // mean task size, bits (2.7 Mbps at a 1 ms slot)
  double C_spread = 0.5;      // relative half-width of the task-size distribution
  int L = 8;                  // channel states per link
  double rho = 0.8;           // channel persistence probability
  double g0 = 1e-5;           // mean path gain used to scale the channel levels
  std::vector<double> gain_levels;  // L gains, ascending; defaults derived from (L, g0)
  double R_cap = 1e-2;        // delay cap behind the slot reward, default 10 * tau0

  NetworkConfig();

  // Throws ConfigError naming the violated bound.
  void validate() const;

  // Reads the [network] section; missing keys keep the defaults above, unknown
  // keys are rejected. `task_rate` (bits/s) may be given instead of C_mean.
  static NetworkConfig from_toml(const TomlDoc& doc);
};

// Ascending per-state channel gains: the conditional means of a unit-mean
// exponential power gain over L equal-probability quantile bins, scaled by g0.
// The levels average to g0 exactly.
std::vector<double> exp_quantile_gain_levels(int L, double g0);

}  // namespace mecsim
