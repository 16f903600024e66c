#include "mecsim/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "mecsim/agents.hpp"
#include "mecsim/env.hpp"

namespace mecsim {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

}  // namespace

SolveInstance random_single_user_instance(Rng& rng) {
  SolveInstance in;
  in.users.push_back({rng.uniform(500.0, 6000.0),
                      std::pow(10.0, rng.uniform(-6.3, -4.5)),
                      std::pow(10.0, rng.uniform(-5.0, -3.0))});
  in.E_max_mec = std::pow(10.0, rng.uniform(-6.0, -2.0));
  return in;
}

CheckOutcome check_oracle_dominance(const SolverSettings& settings, int instances,
                                    std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::check, 1));
  const double t0 = now_s();
  int within = 0;
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const SolveInstance in = random_single_user_instance(rng);
    const SingleUserSolution sol = solve_single_user_sol(in, settings);
    const OracleResult oracle = brute_force_oracle(in, settings.oracle_grid_n);
    const double ratio = (oracle.delay > 0.0) ? sol.delay / oracle.delay : 1.0;
    worst = std::max(worst, ratio);
    if (ratio <= 1.02) ++within;
  }
  const double elapsed = now_s() - t0;
  CheckOutcome out;
  out.name = "solver vs oracle";
  out.pass = (within >= static_cast<int>(std::ceil(0.99 * instances))) && elapsed < 10.0;
  out.detail = std::to_string(within) + "/" + std::to_string(instances) +
               " within 1.02x, worst ratio " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return out;
}

CheckOutcome check_scenario2_residuals(int instances, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::check, 2));
  double worst_finish = 0.0, worst_energy = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int n = 2 + rng.uniform_int(4);
    std::vector<double> A(n), t_tx(n);
    for (int k = 0; k < n; ++k) {
      const double alpha = rng.uniform(0.0, 0.9);
      const double C = rng.uniform(500.0, 6000.0);
      A[k] = (1.0 - alpha) * C * 120.0 * std::cbrt(1e-27);
      t_tx[k] = rng.uniform(0.0, 2e-4);
    }
    const double E = std::pow(10.0, rng.uniform(-5.0, -2.0));
    const std::vector<double> p = solve_shared_mec(A, t_tx, E, 1e-12);

    double t_lo = 0.0, t_hi = 0.0, spent = 0.0;
    for (int k = 0; k < n; ++k) {
      const double finish = t_tx[k] + A[k] / std::cbrt(p[k]);
      t_lo = (k == 0) ? finish : std::min(t_lo, finish);
      t_hi = (k == 0) ? finish : std::max(t_hi, finish);
      spent += std::cbrt(p[k]) * std::cbrt(p[k]) * A[k];
    }
    worst_finish = std::max(worst_finish, (t_hi - t_lo) / t_hi);
    worst_energy = std::max(worst_energy, std::fabs(spent - E) / E);
  }
  CheckOutcome out;
  out.name = "shared-budget residuals";
  out.pass = worst_finish < 1e-8 && worst_energy < 1e-8;
  out.detail = "worst equal-finish " + fmt(worst_finish) + ", worst energy " + fmt(worst_energy);
  return out;
}

CheckOutcome check_gradients(int networks, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::check, 3));
  const double t0 = now_s();
  double worst = 0.0;
  for (int n = 0; n < networks; ++n) {
    std::vector<int> dims;
    dims.push_back(2 + rng.uniform_int(7));  // <= 8
    dims.push_back(2 + rng.uniform_int(15));  // <= 16
    if (rng.uniform01() < 0.5) dims.push_back(2 + rng.uniform_int(7));  // <= 8
    dims.push_back(1 + rng.uniform_int(4));  // <= 4
    const OutputActivation act =
        (n % 2 == 0) ? OutputActivation::identity : OutputActivation::sigmoid;
    Mlp net(dims, act, rng);

    std::vector<double> x(net.input_dim());
    for (double& v : x) v = rng.gaussian() * 0.7;
    std::vector<double> go(net.output_dim());
    for (double& v : go) v = rng.gaussian();

    ForwardCache cache;
    (void)forward(net, x, &cache);
    const Gradients g = backward(net, cache, go);

    auto contraction = [&]() {
      const std::vector<double> y = forward(net, x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * go[i];
      return s;
    };
    const double h = 1e-5;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      for (std::size_t i = 0; i < net.w[l].size(); ++i) {
        const double keep = net.w[l][i];
        net.w[l][i] = keep + h;
        const double fp = contraction();
        net.w[l][i] = keep - h;
        const double fm = contraction();
        net.w[l][i] = keep;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, std::fabs(g.w[l][i] - fd) / (std::fabs(g.w[l][i]) + 1e-8));
      }
      for (std::size_t i = 0; i < net.b[l].size(); ++i) {
        const double keep = net.b[l][i];
        net.b[l][i] = keep + h;
        const double fp = contraction();
        net.b[l][i] = keep - h;
        const double fm = contraction();
        net.b[l][i] = keep;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, std::fabs(g.b[l][i] - fd) / (std::fabs(g.b[l][i]) + 1e-8));
      }
    }
  }
  const double elapsed = now_s() - t0;
  CheckOutcome out;
  out.name = "gradient check";
  out.pass = worst < 1e-4 && elapsed < 1.0;
  out.detail = "worst relative error " + fmt(worst) + " over " + std::to_string(networks) +
               " networks, " + fmt(elapsed) + " s";
  return out;
}

CheckOutcome check_energy_feasibility(int count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::check, 4));
  NetworkConfig cfg;
  const double tol = 1e-9;
  double worst_user = 0.0, worst_mec = 0.0;

  auto check_report = [&](const ControlDecision& d, const DelayReport& rep) {
    for (int k = 0; k < cfg.K; ++k) {
      worst_user = std::max(worst_user, energy_user(d, k, rep) / cfg.E_max_user - 1.0);
    }
    for (int m = 0; m < cfg.M; ++m) {
      worst_mec = std::max(worst_mec, energy_mec(d, m, rep) / cfg.E_max_mec - 1.0);
    }
  };

  auto random_obs_gains = [&](Observation& obs, Grid<double>& gains) {
    obs.h_prev = Grid<double>(cfg.M, cfg.K);
    obs.C_now.assign(cfg.K, 0.0);
    gains = Grid<double>(cfg.M, cfg.K);
    for (int m = 0; m < cfg.M; ++m) {
      for (int k = 0; k < cfg.K; ++k) {
        obs.h_prev.at(m, k) = cfg.gain_levels[rng.uniform_int(cfg.L)];
        gains.at(m, k) = obs.h_prev.at(m, k);
      }
    }
    for (int k = 0; k < cfg.K; ++k) {
      obs.C_now[k] = rng.uniform(cfg.C_mean * 0.5, cfg.C_mean * 1.5);
    }
  };

  // Projected raw actions, energies measured at the gains the projection saw.
  for (int i = 0; i < count; ++i) {
    Observation obs;
    Grid<double> gains;
    random_obs_gains(obs, gains);
    std::vector<double> raw(static_cast<std::size_t>(cfg.K) * (3 + cfg.M));
    for (double& v : raw) v = rng.uniform01();
    const ControlDecision d = project_action(raw, obs, cfg);
    check_report(d, evaluate(d, obs.C_now, gains, cfg));
  }
  // Solver outputs on random assignments and current gains.
  SolverSettings st;
  for (int i = 0; i < count; ++i) {
    Observation obs;
    Grid<double> gains;
    random_obs_gains(obs, gains);
    std::vector<int> assignment(cfg.K);
    for (int& a : assignment) a = rng.uniform_int(cfg.M);
    const auto [d, rep] = solve_assignment(assignment, gains, obs.C_now, cfg, st);
    check_report(d, rep);
  }

  CheckOutcome out;
  out.name = "energy feasibility";
  out.pass = worst_user <= tol && worst_mec <= tol;
  out.detail = "worst user overshoot " + fmt(worst_user) + ", worst server overshoot " +
               fmt(worst_mec) + " (relative)";
  return out;
}

CheckOutcome check_channel_chain(std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.M = 1;
  cfg.K = 1;
  const auto P = transition_matrix(cfg);

  // Empirical transition rows over 1e5 steps.
  EnvState st = init_env(cfg, derive_seed(seed, stream::check, 5));
  std::vector<std::vector<double>> counts(cfg.L, std::vector<double>(cfg.L, 0.0));
  std::vector<double> visits(cfg.L, 0.0);
  int prev = st.channels_now.states.at(0, 0);
  const int steps = 100000;
  for (int t = 0; t < steps; ++t) {
    step_channels(st, cfg);
    const int cur = st.channels_now.states.at(0, 0);
    counts[prev][cur] += 1.0;
    visits[prev] += 1.0;
    prev = cur;
  }
  double worst_row_tv = 0.0;
  for (int i = 0; i < cfg.L; ++i) {
    double tv = 0.0;
    for (int j = 0; j < cfg.L; ++j) {
      const double emp = (visits[i] > 0.0) ? counts[i][j] / visits[i] : 0.0;
      tv += std::fabs(emp - P[i][j]);
    }
    worst_row_tv = std::max(worst_row_tv, 0.5 * tv);
  }

  // Stationary distribution by power iteration, compared to a long histogram.
  std::vector<double> pi(cfg.L, 1.0 / cfg.L);
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> next(cfg.L, 0.0);
    for (int i = 0; i < cfg.L; ++i) {
      for (int j = 0; j < cfg.L; ++j) next[j] += pi[i] * P[i][j];
    }
    pi.swap(next);
  }
  std::vector<double> hist(cfg.L, 0.0);
  EnvState st2 = init_env(cfg, derive_seed(seed, stream::check, 6));
  const int long_steps = 1000000;
  for (int t = 0; t < long_steps; ++t) {
    step_channels(st2, cfg);
    hist[st2.channels_now.states.at(0, 0)] += 1.0;
  }
  double stat_tv = 0.0;
  for (int i = 0; i < cfg.L; ++i) stat_tv += std::fabs(hist[i] / long_steps - pi[i]);
  stat_tv *= 0.5;

  CheckOutcome out;
  out.name = "channel chain";
  out.pass = worst_row_tv < 0.02 && stat_tv < 0.02;
  out.detail = "worst row TV " + fmt(worst_row_tv) + ", stationary TV " + fmt(stat_tv);
  return out;
}

int run_checks(std::ostream& out, std::uint64_t seed) {
  SolverSettings settings;
  std::vector<CheckOutcome> results;
  results.push_back(check_channel_chain(seed));
  results.push_back(check_gradients(50, seed));
  results.push_back(check_scenario2_residuals(200, seed));
  results.push_back(check_energy_feasibility(500, seed));
  results.push_back(check_oracle_dominance(settings, 200, seed));
  int failures = 0;
  for (const CheckOutcome& r : results) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace mecsim
