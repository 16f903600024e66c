#pragma once

#include <string>

#include "mecsim/config.hpp"
#include "mecsim/env.hpp"
#include "mecsim/ratemodel.hpp"
#include "mecsim/rng.hpp"

namespace mecsim {

enum class BaselineKind { random_alloc, local_only, mec_only };

BaselineKind baseline_kind_from_string(const std::string& name);
std::string to_string(BaselineKind kind);

// Comparison policies sharing the environment and reward path:
//  - random_alloc draws a uniform raw action and projects it, so assignment,
//    split ratio and energy splits are all random with budget-activating powers;
//  - local_only computes everything on-device with the full user budget;
//  - mec_only offloads everything to the best delayed-gain server, splitting
//    each server budget equally among its users.
ControlDecision baseline_decide(BaselineKind kind, const Observation& obs,
                                const NetworkConfig& cfg, Rng& rng);

}  // namespace mecsim
