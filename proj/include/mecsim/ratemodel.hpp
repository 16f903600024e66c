#pragma once

#include <vector>

#include "mecsim/config.hpp"
#include "mecsim/env.hpp"
#include "mecsim/types.hpp"

namespace mecsim {

// One slot's full control decision: per-user split ratio and powers, plus the
// per-(server, user) compute power grid. p_mec may be positive only at the
// assigned server of each user.
struct ControlDecision {
  std::vector<double> alpha;    // local split ratio per user, in [0, 1]
  std::vector<double> p_local;  // local CPU power per user, W
  std::vector<double> p_tx;     // transmit power per user, W
  Grid<double> p_mec;           // M x K server CPU power, W
  std::vector<int> assignment;  // server index per user

  static ControlDecision zeros(int M, int K);
};

// Per-user delay breakdown and the slot reward.
struct DelayReport {
  std::vector<double> t_local;  // seconds
  std::vector<double> t_tx;
  std::vector<double> t_mec;
  std::vector<double> t_total;  // max(t_local, t_tx + t_mec)
  double slot_delay = 0.0;      // max over users
  double reward = 0.0;          // -min(slot_delay, R_cap)
};

// Shannon-style offload rate in bits/s; zero power gives zero rate.
double offload_rate(double p_tx, double gain, double B, double N0);

// DVFS computing rates in bits/s: cube-root frequency over cycles-per-bit.
double local_rate(double p_local, double kappa_u, double D_k);
double mec_rate(double p_mec, double kappa_m, double D_m);

// Evaluates a decision against the current-slot gains. Conventions: a zero
// workload costs zero time even with zero power; a positive workload with zero
// rate costs R_cap. Structural invariant violations raise ContractError.
DelayReport evaluate(const ControlDecision& d, const TaskVector& tasks,
                     const Grid<double>& gains_now, const NetworkConfig& cfg);

// Energy actually spent, from the powers and the reported delays.
double energy_user(const ControlDecision& d, int k, const DelayReport& rep);
double energy_mec(const ControlDecision& d, int m, const DelayReport& rep);

}  // namespace mecsim
