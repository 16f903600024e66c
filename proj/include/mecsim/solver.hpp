#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mecsim/config.hpp"
#include "mecsim/ratemodel.hpp"
#include "mecsim/toml.hpp"

namespace mecsim {

struct SolverSettings {
  double bisection_tol = 1e-6;  // relative interval width for 1-D bisections
  int max_alternations = 20;    // rounds of the alternating solves
  double golden_tol = 1e-3;     // energy-split search tolerance
  int oracle_grid_n = 200;      // grid points per axis in the brute-force oracle

  void validate() const;
  static SolverSettings from_toml(const TomlDoc& doc);
};

// One user as the solver sees it: current-slot gain toward its server.
struct UserInstance {
  double C = 0.0;           // bits
  double gain = 0.0;        // dimensionless power gain
  double E_max_user = 0.0;  // J
};

// Everything needed to allocate one server's resources among its users.
struct SolveInstance {
  std::vector<UserInstance> users;
  double E_max_mec = 0.0;
  double B = 1e6, N0 = 4e-15;
  double kappa_u = 1e-27, kappa_m = 1e-27;
  double D_k = 300.0, D_m = 120.0;
  double R_cap = 1e-2;

  void validate() const;
  static SolveInstance from_config(const NetworkConfig& cfg);  // constants only
};

// Server compute power that spends exactly E_budget on the offloaded bits.
double mec_power_closed_form(double alpha, double C, double E_budget, double kappa_m,
                             double D_m);

// Local CPU power that spends exactly E_residual on the local bits.
double local_power_closed_form(double alpha, double C, double E_residual, double kappa_u,
                               double D_k);

// Largest transmit power whose transmit energy on the offloaded bits stays
// within E_budget, by bisection (the energy is strictly increasing in power,
// the transmit time strictly decreasing, so the budget-active power is
// delay-optimal). Returns 0 when there is nothing to send or no budget;
// capped at 1e3 W.
double solve_transmit_power(double alpha, double C, double gain, double E_budget, double B,
                            double N0, double tol);

// Minimizes max(local_coeff * a, mec_side(a)) over a in [0, 1], where the
// local side is linear increasing and mec_side non-increasing. Candidates are
// the two corners and the unique crossing, found by bisection; exact ties
// prefer the smaller split, i.e. more offloading.
double solve_alpha(double local_coeff, const std::function<double(double)>& mec_side,
                   double tol = 1e-12);

// Per-user solution pieces kept alongside the powers for reporting.
struct SingleUserSolution {
  double alpha = 0.0;
  double beta = 1.0;  // share of the user budget spent locally
  double p_local = 0.0, p_tx = 0.0, p_mec = 0.0;
  double t_local = 0.0, t_tx = 0.0, t_mec = 0.0;
  double delay = 0.0;  // max(t_local, t_tx + t_mec)
};

// One user on one server: alternates the closed-form local power, the
// transmit-power bisection and the split-ratio rule inside a golden-section
// search over the user's local/transmit energy split, then takes the best of
// that and the two pure corners.
SingleUserSolution solve_single_user_sol(const SolveInstance& inst, const SolverSettings& s);
ControlDecision solve_single_user(const SolveInstance& inst, const SolverSettings& s);

// Splits a server budget among users with fixed split ratios and transmit
// times so all offloading users finish at a common time T and the budget is
// spent exactly. A[k] must be positive (offloaded bits times D_m kappa_m^{1/3}).
std::vector<double> solve_shared_mec(const std::vector<double>& A,
                                     const std::vector<double>& t_tx, double E_max_mec,
                                     double tol);

// Full allocation for one server: per-user solves alternate with the shared
// budget re-split until the server's max delay stops improving.
struct ServerSolution {
  std::vector<SingleUserSolution> users;  // same order as the instance
  double max_delay = 0.0;
};
ServerSolution solve_server(const SolveInstance& inst, const SolverSettings& s);

// Network-wide solve for a fixed assignment on current-slot gains.
std::pair<ControlDecision, DelayReport> solve_assignment(const std::vector<int>& assignment,
                                                         const Grid<double>& gains_now,
                                                         const TaskVector& tasks,
                                                         const NetworkConfig& cfg,
                                                         const SolverSettings& s);

// Exhaustive verification oracle for single-user instances: a grid_n x grid_n
// grid over the split ratio and the energy split, powers from the same closed
// forms, returning the grid argmin.
struct OracleResult {
  SingleUserSolution best;
  double delay = 0.0;
};
OracleResult brute_force_oracle(const SolveInstance& inst, int grid_n);

}  // namespace mecsim
