#pragma once

#include <stdexcept>
#include <string>

namespace mecsim {

// Invalid or inconsistent configuration: bad TOML keys, violated bounds, bad files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's contract (dimension mismatch, invariant violation).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A closed form was asked for a case it cannot express (split ratio at a corner).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An energy budget is exhausted or negative before the allocation step.
class InfeasibleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mecsim
