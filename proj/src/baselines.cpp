#include "mecsim/baselines.hpp"

#include <vector>

#include "mecsim/agents.hpp"
#include "mecsim/errors.hpp"
#include "mecsim/solver.hpp"

namespace mecsim {

BaselineKind baseline_kind_from_string(const std::string& name) {
  if (name == "random") return BaselineKind::random_alloc;
  if (name == "local_only") return BaselineKind::local_only;
  if (name == "mec_only") return BaselineKind::mec_only;
  throw ConfigError("unknown baseline '" + name + "' (random, local_only, mec_only)");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::random_alloc: return "random";
    case BaselineKind::local_only: return "local_only";
    case BaselineKind::mec_only: return "mec_only";
  }
  return "?";
}

namespace {

ControlDecision decide_random(const Observation& obs, const NetworkConfig& cfg, Rng& rng) {
  std::vector<double> raw(static_cast<std::size_t>(cfg.K) * (3 + cfg.M));
  for (double& v : raw) v = rng.uniform01();
  return project_action(raw, obs, cfg);
}

ControlDecision decide_local_only(const Observation& obs, const NetworkConfig& cfg) {
  ControlDecision d = ControlDecision::zeros(cfg.M, cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    d.alpha[k] = 1.0;
    if (obs.C_now[k] > 0.0)
      d.p_local[k] =
          local_power_closed_form(1.0, obs.C_now[k], cfg.E_max_user, cfg.kappa_u, cfg.D_k);
  }
  return d;
}

ControlDecision decide_mec_only(const Observation& obs, const NetworkConfig& cfg) {
  ControlDecision d = ControlDecision::zeros(cfg.M, cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    int server = 0;
    for (int m = 1; m < cfg.M; ++m) {
      if (obs.h_prev.at(m, k) > obs.h_prev.at(server, k)) server = m;
    }
    d.assignment[k] = server;
    d.alpha[k] = 0.0;
    if (obs.C_now[k] > 0.0)
      d.p_tx[k] = solve_transmit_power(0.0, obs.C_now[k], obs.h_prev.at(server, k),
                                       cfg.E_max_user, cfg.B, cfg.N0, 1e-10);
  }
  for (int m = 0; m < cfg.M; ++m) {
    std::vector<int> members;
    for (int k = 0; k < cfg.K; ++k) {
      if (d.assignment[k] == m && obs.C_now[k] > 0.0) members.push_back(k);
    }
    if (members.empty()) continue;
    const double share = cfg.E_max_mec / static_cast<double>(members.size());
    for (int k : members) {
      d.p_mec.at(m, k) = mec_power_closed_form(0.0, obs.C_now[k], share, cfg.kappa_m, cfg.D_m);
    }
  }
  return d;
}

}  // namespace

ControlDecision baseline_decide(BaselineKind kind, const Observation& obs,
                                const NetworkConfig& cfg, Rng& rng) {
  switch (kind) {
    case BaselineKind::random_alloc: return decide_random(obs, cfg, rng);
    case BaselineKind::local_only: return decide_local_only(obs, cfg);
    case BaselineKind::mec_only: return decide_mec_only(obs, cfg);
  }
  throw ContractError("baseline_decide: unreachable");
}

}  // namespace mecsim
