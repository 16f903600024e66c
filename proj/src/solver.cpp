#include "mecsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mecsim/errors.hpp"

namespace mecsim {

namespace {

inline double pow15(double x) { return x * std::sqrt(x); }

constexpr double kTxPowerCap = 1e3;  // W

double tx_energy(double bits, double p, double gain, double B, double N0) {
  return bits * p / offload_rate(p, gain, B, N0);
}

// Bisection with a caller-supplied feasible lower bracket (used by the oracle
// to warm-start along an ascending sweep).
double tx_power_bisect(double bits, double gain, double E_budget, double B, double N0,
                       double tol, double lo_start) {
  if (bits <= 0.0 || gain <= 0.0 || E_budget <= 0.0) return 0.0;
  if (tx_energy(bits, kTxPowerCap, gain, B, N0) <= E_budget) return kTxPowerCap;
  double lo = 0.0, hi = kTxPowerCap;
  if (lo_start > 0.0 && lo_start < hi && tx_energy(bits, lo_start, gain, B, N0) <= E_budget) {
    lo = lo_start;
  }
  for (int it = 0; it < 400 && (hi - lo) > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tx_energy(bits, mid, gain, B, N0) <= E_budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi < 1e-300) break;
  }
  return lo;
}

// Same solve with a two-sided guess: geometric expansion around the previous
// solution narrows the bracket before bisecting.
double tx_power_bisect_guess(double bits, double gain, double E_budget, double B, double N0,
                             double tol, double guess) {
  if (bits <= 0.0 || gain <= 0.0 || E_budget <= 0.0) return 0.0;
  if (guess <= 0.0 || guess >= kTxPowerCap)
    return tx_power_bisect(bits, gain, E_budget, B, N0, tol, 0.0);
  double lo, hi;
  if (tx_energy(bits, guess, gain, B, N0) <= E_budget) {
    lo = guess;
    hi = guess * 2.0;
    int grow = 0;
    while (hi < kTxPowerCap && tx_energy(bits, hi, gain, B, N0) <= E_budget && ++grow < 64) {
      lo = hi;
      hi *= 2.0;
    }
    if (hi >= kTxPowerCap) {
      if (tx_energy(bits, kTxPowerCap, gain, B, N0) <= E_budget) return kTxPowerCap;
      hi = kTxPowerCap;
    }
  } else {
    hi = guess;
    lo = guess * 0.5;
    int shrink = 0;
    while (lo > 1e-300 && tx_energy(bits, lo, gain, B, N0) > E_budget && ++shrink < 1200) {
      hi = lo;
      lo *= 0.5;
    }
    if (lo <= 1e-300 || tx_energy(bits, lo, gain, B, N0) > E_budget) lo = 0.0;
  }
  for (int it = 0; it < 400 && (hi - lo) > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tx_energy(bits, mid, gain, B, N0) <= E_budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi < 1e-300) break;
  }
  return lo;
}

}  // namespace

void SolverSettings::validate() const {
  if (!(bisection_tol > 0.0 && bisection_tol < 1.0))
    throw ConfigError("solver settings: bisection_tol must be in (0, 1)");
  if (!(golden_tol > 0.0 && golden_tol < 1.0))
    throw ConfigError("solver settings: golden_tol must be in (0, 1)");
  if (max_alternations < 1) throw ConfigError("solver settings: max_alternations must be >= 1");
  if (oracle_grid_n < 2) throw ConfigError("solver settings: oracle_grid_n must be >= 2");
}

SolverSettings SolverSettings::from_toml(const TomlDoc& doc) {
  SolverSettings s;
  SectionReader r(doc, "solver");
  s.bisection_tol = r.get_double("bisection_tol", s.bisection_tol);
  s.max_alternations = static_cast<int>(r.get_int("max_alternations", s.max_alternations));
  s.golden_tol = r.get_double("golden_tol", s.golden_tol);
  s.oracle_grid_n = static_cast<int>(r.get_int("oracle_grid_n", s.oracle_grid_n));
  r.finish();
  s.validate();
  return s;
}

void SolveInstance::validate() const {
  if (!(E_max_mec > 0.0)) throw ContractError("solve instance: E_max_mec must be > 0");
  if (!(B > 0.0 && N0 > 0.0 && kappa_u > 0.0 && kappa_m > 0.0 && D_k > 0.0 && D_m > 0.0 &&
        R_cap > 0.0))
    throw ContractError("solve instance: constants must be > 0");
  for (const UserInstance& u : users) {
    if (u.C < 0.0 || u.gain < 0.0 || !(u.E_max_user > 0.0))
      throw ContractError("solve instance: user fields out of range");
  }
}

SolveInstance SolveInstance::from_config(const NetworkConfig& cfg) {
  SolveInstance in;
  in.E_max_mec = cfg.E_max_mec;
  in.B = cfg.B;
  in.N0 = cfg.N0;
  in.kappa_u = cfg.kappa_u;
  in.kappa_m = cfg.kappa_m;
  in.D_k = cfg.D_k;
  in.D_m = cfg.D_m;
  in.R_cap = cfg.R_cap;
  return in;
}

double mec_power_closed_form(double alpha, double C, double E_budget, double kappa_m,
                             double D_m) {
  if (alpha >= 1.0) throw DegenerateInputError("mec power: alpha = 1 leaves no offloaded bits");
  if (!(alpha >= 0.0) || !(C > 0.0) || !(E_budget > 0.0) || !(kappa_m > 0.0) || !(D_m > 0.0))
    throw ContractError("mec power: inputs must be positive with alpha in [0, 1)");
  const double denom = (1.0 - alpha) * C * std::cbrt(kappa_m) * D_m;
  return pow15(E_budget / denom);
}

double local_power_closed_form(double alpha, double C, double E_residual, double kappa_u,
                               double D_k) {
  if (alpha <= 0.0) throw DegenerateInputError("local power: alpha = 0 leaves no local bits");
  if (E_residual <= 0.0) throw InfeasibleBudgetError("local power: no energy left");
  if (!(alpha <= 1.0) || !(C > 0.0) || !(kappa_u > 0.0) || !(D_k > 0.0))
    throw ContractError("local power: inputs must be positive with alpha in (0, 1]");
  const double denom = alpha * C * D_k * std::cbrt(kappa_u);
  return pow15(E_residual / denom);
}

double solve_transmit_power(double alpha, double C, double gain, double E_budget, double B,
                            double N0, double tol) {
  if (C < 0.0 || gain < 0.0 || E_budget < 0.0 || !(B > 0.0) || !(N0 > 0.0) || !(tol > 0.0))
    throw ContractError("transmit power: inputs out of range");
  const double bits = (1.0 - alpha) * C;
  return tx_power_bisect(bits, gain, E_budget, B, N0, tol, 0.0);
}

double solve_alpha(double local_coeff, const std::function<double(double)>& mec_side,
                   double tol) {
  if (!(local_coeff > 0.0) || !std::isfinite(local_coeff))
    throw ContractError("solve_alpha: local coefficient must be positive and finite");
  const double f2_0 = mec_side(0.0);
  const double f2_h = mec_side(0.5);
  const double f2_1 = mec_side(1.0);
  const double slack = 1e-9 * (std::fabs(f2_0) + std::fabs(f2_1)) + 1e-300;
  if (f2_h > f2_0 + slack || f2_1 > f2_h + slack)
    throw ContractError("solve_alpha: offload-side delay must be non-increasing");

  // Candidates in ascending order so exact ties keep the smaller split.
  double best_a = 0.0;
  double best_f = std::max(0.0, f2_0);  // local side is zero at alpha = 0

  if (f2_0 > 0.0 && local_coeff >= f2_1) {
    // The sides cross exactly once; their difference is strictly increasing.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (local_coeff * mid < mec_side(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double x = 0.5 * (lo + hi);
    const double f = std::max(local_coeff * x, mec_side(x));
    if (f < best_f) {
      best_a = x;
      best_f = f;
    }
  }

  const double f_at_1 = std::max(local_coeff, f2_1);
  if (f_at_1 < best_f) {
    best_a = 1.0;
    best_f = f_at_1;
  }
  return best_a;
}

namespace {

// Delay breakdown for one user under the shared reporting conventions.
void fill_delays(SingleUserSolution& s, const SolveInstance& in, const UserInstance& u) {
  const double load_local = s.alpha * u.C;
  const double load_off = (1.0 - s.alpha) * u.C;
  s.t_local = 0.0;
  s.t_tx = 0.0;
  s.t_mec = 0.0;
  if (load_local > 0.0) {
    const double r = local_rate(s.p_local, in.kappa_u, in.D_k);
    s.t_local = (r > 0.0) ? load_local / r : in.R_cap;
  }
  double off_time = 0.0;
  if (load_off > 0.0) {
    const double ro = offload_rate(s.p_tx, u.gain, in.B, in.N0);
    const double rc = mec_rate(s.p_mec, in.kappa_m, in.D_m);
    s.t_tx = (ro > 0.0) ? load_off / ro : in.R_cap;
    s.t_mec = (rc > 0.0) ? load_off / rc : in.R_cap;
    off_time = (ro > 0.0 && rc > 0.0) ? s.t_tx + s.t_mec : in.R_cap;
  }
  s.delay = std::max(s.t_local, off_time);
}

// Powers for a fixed (alpha, beta) with every available budget activated.
// beta is the share of the user budget given to local computing.
SingleUserSolution finalize_split(const SolveInstance& in, const UserInstance& u,
                                  double E_mec_share, double alpha, double beta, double tol) {
  SingleUserSolution s;
  s.alpha = alpha;
  s.beta = beta;
  const double E_loc = beta * u.E_max_user;
  const double E_tx = (1.0 - beta) * u.E_max_user;
  const double load_local = alpha * u.C;
  const double load_off = (1.0 - alpha) * u.C;
  if (load_local > 0.0 && E_loc > 0.0)
    s.p_local = local_power_closed_form(alpha, u.C, E_loc, in.kappa_u, in.D_k);
  if (load_off > 0.0 && E_tx > 0.0)
    s.p_tx = solve_transmit_power(alpha, u.C, u.gain, E_tx, in.B, in.N0, tol);
  if (load_off > 0.0 && E_mec_share > 0.0)
    s.p_mec = mec_power_closed_form(alpha, u.C, E_mec_share, in.kappa_m, in.D_m);
  fill_delays(s, in, u);
  return s;
}

// The alternating solve for a fixed local/transmit energy split. The plain
// alternation contracts with an oscillating sign, so every two steps an Aitken
// extrapolation collapses most of the remaining error.
SingleUserSolution split_alternation(const SolveInstance& in, const UserInstance& u,
                                     double E_mec_share, double beta,
                                     const SolverSettings& st) {
  if (E_mec_share <= 0.0) return finalize_split(in, u, 0.0, 1.0, 1.0, st.bisection_tol);
  const double E_loc = beta * u.E_max_user;
  const double E_tx = (1.0 - beta) * u.E_max_user;
  const double mec_scale = std::sqrt(in.kappa_m / E_mec_share);
  double p_o_guess = 0.0;

  // One alternation round: local power at the split, transmit power at the
  // split, then the three-case rule for the next split.
  auto next_alpha = [&](double a) {
    const double p_l = local_power_closed_form(a, u.C, E_loc, in.kappa_u, in.D_k);
    const double p_o = tx_power_bisect_guess((1.0 - a) * u.C, u.gain, E_tx, in.B, in.N0,
                                             st.bisection_tol, p_o_guess);
    p_o_guess = p_o;
    const double r_o = offload_rate(p_o, u.gain, in.B, in.N0);
    if (r_o <= 0.0) return 1.0;  // this split cannot transmit at all
    const double lin = u.C * in.D_k * std::cbrt(in.kappa_u / p_l);
    auto mec_side = [&](double x) {
      const double off = (1.0 - x) * u.C;
      return off / r_o + pow15(off * in.D_m) * mec_scale;
    };
    return solve_alpha(lin, mec_side, 1e-12);
  };

  double alpha = 0.5;
  try {
    int it = 0;
    while (it < st.max_alternations) {
      const double x1 = next_alpha(alpha);
      ++it;
      if (x1 <= 0.0 || x1 >= 1.0 || std::fabs(x1 - alpha) < 1e-9) {
        alpha = x1;
        break;
      }
      if (it >= st.max_alternations) {
        alpha = x1;
        break;
      }
      const double x2 = next_alpha(x1);
      ++it;
      if (x2 <= 0.0 || x2 >= 1.0 || std::fabs(x2 - x1) < 1e-9) {
        alpha = x2;
        break;
      }
      const double denom = (x2 - x1) - (x1 - alpha);
      double acc = x2;
      if (std::fabs(denom) > 1e-300) acc = x2 - (x2 - x1) * (x2 - x1) / denom;
      alpha = (acc > 0.0 && acc < 1.0) ? acc : x2;
    }
  } catch (const DegenerateInputError&) {
    // fall through and price the current split as-is
  } catch (const InfeasibleBudgetError&) {
  }
  return finalize_split(in, u, E_mec_share, alpha, beta, st.bisection_tol);
}

SingleUserSolution solve_one_user(const SolveInstance& in, const UserInstance& u,
                                  double E_mec_share, const SolverSettings& st,
                                  const double* warm_beta = nullptr) {
  if (u.C <= 0.0) return SingleUserSolution{};

  // Pure corners always compete: all energy local, or all energy transmit.
  SingleUserSolution best = finalize_split(in, u, E_mec_share, 1.0, 1.0, st.bisection_tol);
  {
    SingleUserSolution off = finalize_split(in, u, E_mec_share, 0.0, 0.0, st.bisection_tol);
    if (off.delay < best.delay) best = off;
  }
  if (E_mec_share <= 0.0 || u.gain <= 0.0) return best;

  double lo, hi;
  if (warm_beta) {
    // Refine around a previous round's split.
    lo = std::max(1e-6, *warm_beta - 0.15);
    hi = std::min(1.0 - 1e-6, *warm_beta + 0.15);
    SingleUserSolution s = split_alternation(in, u, E_mec_share, *warm_beta, st);
    if (s.delay < best.delay) best = s;
  } else {
    // Coarse scan over the energy split, then golden-section refinement
    // around the best coarse point.
    constexpr int kCoarse = 5;
    double beta_pts[kCoarse];
    double beta_val[kCoarse];
    int best_i = 0;
    for (int i = 0; i < kCoarse; ++i) {
      beta_pts[i] = 0.05 + 0.90 * static_cast<double>(i) / (kCoarse - 1);
      SingleUserSolution s = split_alternation(in, u, E_mec_share, beta_pts[i], st);
      beta_val[i] = s.delay;
      if (s.delay < best.delay) best = s;
      if (beta_val[i] < beta_val[best_i]) best_i = i;
    }
    lo = (best_i == 0) ? 1e-6 : beta_pts[best_i - 1];
    hi = (best_i == kCoarse - 1) ? 1.0 - 1e-6 : beta_pts[best_i + 1];
  }

  const double inv_phi = 0.6180339887498949;
  double x1 = hi - (hi - lo) * inv_phi;
  double x2 = lo + (hi - lo) * inv_phi;
  SingleUserSolution s1 = split_alternation(in, u, E_mec_share, x1, st);
  SingleUserSolution s2 = split_alternation(in, u, E_mec_share, x2, st);
  if (s1.delay < best.delay) best = s1;
  if (s2.delay < best.delay) best = s2;
  for (int it = 0; it < 80 && (hi - lo) > st.golden_tol; ++it) {
    if (s1.delay < s2.delay) {
      hi = x2;
      x2 = x1;
      s2 = s1;
      x1 = hi - (hi - lo) * inv_phi;
      s1 = split_alternation(in, u, E_mec_share, x1, st);
      if (s1.delay < best.delay) best = s1;
    } else {
      lo = x1;
      x1 = x2;
      s1 = s2;
      x2 = lo + (hi - lo) * inv_phi;
      s2 = split_alternation(in, u, E_mec_share, x2, st);
      if (s2.delay < best.delay) best = s2;
    }
  }
  return best;
}

}  // namespace

SingleUserSolution solve_single_user_sol(const SolveInstance& inst, const SolverSettings& s) {
  inst.validate();
  s.validate();
  if (inst.users.size() != 1)
    throw ContractError("solve_single_user: instance must hold exactly one user");
  return solve_one_user(inst, inst.users[0], inst.E_max_mec, s);
}

ControlDecision solve_single_user(const SolveInstance& inst, const SolverSettings& s) {
  const SingleUserSolution sol = solve_single_user_sol(inst, s);
  ControlDecision d = ControlDecision::zeros(1, 1);
  d.alpha[0] = sol.alpha;
  d.p_local[0] = sol.p_local;
  d.p_tx[0] = sol.p_tx;
  d.p_mec.at(0, 0) = sol.p_mec;
  d.assignment[0] = 0;
  return d;
}

std::vector<double> solve_shared_mec(const std::vector<double>& A,
                                     const std::vector<double>& t_tx, double E_max_mec,
                                     double tol) {
  if (A.empty()) return {};
  if (A.size() != t_tx.size())
    throw ContractError("solve_shared_mec: A and t_tx sizes differ");
  if (!(E_max_mec > 0.0)) throw ContractError("solve_shared_mec: budget must be > 0");
  double t_max = 0.0;
  double sum_a3 = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (!(A[k] > 0.0)) throw ContractError("solve_shared_mec: A entries must be > 0");
    if (t_tx[k] < 0.0) throw ContractError("solve_shared_mec: negative transmit time");
    t_max = std::max(t_max, t_tx[k]);
    sum_a3 += A[k] * A[k] * A[k];
  }
  // Find x = T - max t_tx with sum_k A_k^3 / (x + gap_k)^2 = budget. The left
  // side falls strictly in x, diverges as x -> 0 and is below the budget at
  // x = sqrt(sum A^3 / E).
  auto spent = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < A.size(); ++k) {
      const double d = x + (t_max - t_tx[k]);
      s += A[k] * A[k] * A[k] / (d * d);
    }
    return s;
  };
  const double rtol = std::min(tol, 1e-12);
  double lo = 0.0;
  double hi = std::sqrt(sum_a3 / E_max_mec) * (1.0 + 1e-12) + 1e-300;
  for (int it = 0; it < 300; ++it) {
    if (lo > 0.0 && (hi - lo) <= rtol * lo) break;
    const double mid = 0.5 * (lo + hi);
    if (spent(mid) > E_max_mec) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = hi;  // feasible side: total energy <= budget
  std::vector<double> p(A.size());
  for (std::size_t k = 0; k < A.size(); ++k) {
    const double d = x + (t_max - t_tx[k]);
    const double c = A[k] / d;
    p[k] = c * c * c;
  }
  return p;
}

ServerSolution solve_server(const SolveInstance& inst, const SolverSettings& st) {
  inst.validate();
  st.validate();
  ServerSolution out;
  const std::size_t n = inst.users.size();
  if (n == 0) return out;
  if (n == 1) {
    out.users.push_back(solve_one_user(inst, inst.users[0], inst.E_max_mec, st));
    out.max_delay = out.users[0].delay;
    return out;
  }

  std::vector<double> share(n, inst.E_max_mec / static_cast<double>(n));
  std::vector<SingleUserSolution> sols(n);
  std::vector<double> warm(n, 0.5);
  double best_delay = std::numeric_limits<double>::infinity();
  std::vector<SingleUserSolution> best_sols;
  double prev_delay = std::numeric_limits<double>::infinity();

  for (int round = 0; round < st.max_alternations; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      sols[i] = solve_one_user(inst, inst.users[i], share[i], st,
                               round > 0 ? &warm[i] : nullptr);
      warm[i] = sols[i].beta;
    }
    // Re-split the server budget at the fixed splits and transmit times so all
    // offloading users finish together.
    std::vector<std::size_t> off_idx;
    std::vector<double> A, t_tx;
    for (std::size_t i = 0; i < n; ++i) {
      const double load_off = (1.0 - sols[i].alpha) * inst.users[i].C;
      if (load_off > 0.0) {
        off_idx.push_back(i);
        A.push_back(load_off * inst.D_m * std::cbrt(inst.kappa_m));
        t_tx.push_back(sols[i].t_tx);
      }
    }
    if (!off_idx.empty()) {
      const std::vector<double> p =
          solve_shared_mec(A, t_tx, inst.E_max_mec, st.bisection_tol);
      for (std::size_t j = 0; j < off_idx.size(); ++j) {
        SingleUserSolution& s = sols[off_idx[j]];
        s.p_mec = p[j];
        s.t_mec = (p[j] > 0.0) ? A[j] / std::cbrt(p[j]) : inst.R_cap;
        const bool tx_dead = (s.p_tx <= 0.0);
        s.delay = std::max(s.t_local, tx_dead ? inst.R_cap : s.t_tx + s.t_mec);
        const double c = std::cbrt(p[j]);
        share[off_idx[j]] = c * c * A[j];  // implied energy of this allocation
      }
    }
    double server_delay = 0.0;
    for (const SingleUserSolution& s : sols) server_delay = std::max(server_delay, s.delay);
    if (server_delay < best_delay) {
      best_delay = server_delay;
      best_sols = sols;
    }
    if (std::isfinite(prev_delay) &&
        prev_delay - server_delay < st.bisection_tol * std::max(prev_delay, 1e-300)) {
      break;
    }
    prev_delay = server_delay;
  }
  out.users = std::move(best_sols);
  out.max_delay = best_delay;
  return out;
}

std::pair<ControlDecision, DelayReport> solve_assignment(const std::vector<int>& assignment,
                                                         const Grid<double>& gains_now,
                                                         const TaskVector& tasks,
                                                         const NetworkConfig& cfg,
                                                         const SolverSettings& s) {
  const int M = cfg.M, K = cfg.K;
  if (static_cast<int>(assignment.size()) != K)
    throw ContractError("solve_assignment: assignment size mismatch");
  if (gains_now.rows != M || gains_now.cols != K || static_cast<int>(tasks.size()) != K)
    throw ContractError("solve_assignment: gains or tasks size mismatch");

  ControlDecision d = ControlDecision::zeros(M, K);
  d.assignment = assignment;

  for (int m = 0; m < M; ++m) {
    std::vector<int> members;
    for (int k = 0; k < K; ++k) {
      if (assignment[k] < 0 || assignment[k] >= M)
        throw ContractError("solve_assignment: assignment index out of range");
      if (assignment[k] == m) members.push_back(k);
    }
    if (members.empty()) continue;

    SolveInstance inst = SolveInstance::from_config(cfg);
    for (int k : members) {
      inst.users.push_back({tasks[k], gains_now.at(m, k), cfg.E_max_user});
    }
    const ServerSolution sol = solve_server(inst, s);
    for (std::size_t j = 0; j < members.size(); ++j) {
      const int k = members[j];
      d.alpha[k] = sol.users[j].alpha;
      d.p_local[k] = sol.users[j].p_local;
      d.p_tx[k] = sol.users[j].p_tx;
      d.p_mec.at(m, k) = sol.users[j].p_mec;
    }
  }
  DelayReport rep = evaluate(d, tasks, gains_now, cfg);
  return {std::move(d), std::move(rep)};
}

OracleResult brute_force_oracle(const SolveInstance& inst, int grid_n) {
  inst.validate();
  if (inst.users.size() != 1)
    throw ContractError("brute_force_oracle: instance must hold exactly one user");
  if (grid_n < 2) throw ContractError("brute_force_oracle: grid_n must be >= 2");
  const UserInstance& u = inst.users[0];

  OracleResult out;
  out.delay = std::numeric_limits<double>::infinity();
  if (u.C <= 0.0) {
    out.best = SingleUserSolution{};
    out.delay = 0.0;
    return out;
  }

  const double step = 1.0 / static_cast<double>(grid_n - 1);
  int best_i = 0, best_j = 0;
  const double mec_scale = std::sqrt(inst.kappa_m / inst.E_max_mec);
  const double loc_scale_num = std::sqrt(inst.kappa_u);

  for (int j = 0; j < grid_n; ++j) {
    const double beta = j * step;
    const double E_loc = beta * u.E_max_user;
    const double E_tx = (1.0 - beta) * u.E_max_user;
    double warm_p = 0.0;  // transmit power grows with the split, reuse the bracket
    for (int i = 0; i < grid_n; ++i) {
      const double alpha = i * step;
      const double load_local = alpha * u.C;
      const double load_off = (1.0 - alpha) * u.C;

      double t_local = 0.0;
      if (load_local > 0.0) {
        t_local = (E_loc > 0.0) ? pow15(load_local * inst.D_k) * loc_scale_num / std::sqrt(E_loc)
                                : inst.R_cap;
      }
      if (t_local >= out.delay) continue;

      double delay;
      if (load_off <= 0.0) {
        delay = t_local;
      } else {
        const double t_mec = pow15(load_off * inst.D_m) * mec_scale;
        if (t_mec >= out.delay) continue;
        double t_tx = -1.0;  // negative marks a dead transmit stage
        if (E_tx > 0.0 && u.gain > 0.0) {
          const double p =
              tx_power_bisect(load_off, u.gain, E_tx, inst.B, inst.N0, 1e-10, warm_p);
          warm_p = p;
          const double r = offload_rate(p, u.gain, inst.B, inst.N0);
          if (r > 0.0) t_tx = load_off / r;
        }
        delay = std::max(t_local, (t_tx >= 0.0) ? t_tx + t_mec : inst.R_cap);
      }
      if (delay < out.delay) {
        out.delay = delay;
        best_i = i;
        best_j = j;
      }
    }
  }
  out.best = finalize_split(inst, u, inst.E_max_mec, best_i * step, best_j * step, 1e-10);
  out.delay = out.best.delay;
  return out;
}

}  // namespace mecsim
