#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mecsim/solver.hpp"

namespace mecsim {

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Random single-user instances spanning weak/strong channels and tight/loose
// budgets; shared by the oracle comparison and the feasibility sweeps.
SolveInstance random_single_user_instance(Rng& rng);

// Alternating solver against the exhaustive grid oracle on seeded instances.
CheckOutcome check_oracle_dominance(const SolverSettings& settings, int instances,
                                    std::uint64_t seed);

// Shared-budget allocation: equal finish times and exact budget spend.
CheckOutcome check_scenario2_residuals(int instances, std::uint64_t seed);

// Analytic backpropagation against central finite differences.
CheckOutcome check_gradients(int networks, std::uint64_t seed);

// Projected actions and solver outputs against the energy budgets.
CheckOutcome check_energy_feasibility(int count, std::uint64_t seed);

// Empirical channel transitions and long-run histogram against the chain.
CheckOutcome check_channel_chain(std::uint64_t seed);

// Runs the full fast suite, printing one PASS/FAIL line per check.
// Returns the number of failures.
int run_checks(std::ostream& out, std::uint64_t seed = 1234);

}  // namespace mecsim
