#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mecsim/env.hpp"
#include "mecsim/errors.hpp"

using namespace mecsim;

namespace {

// Stationary distribution of a row-stochastic matrix by power iteration;
// independent of the sampling path used by the environment.
std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
  const int n = static_cast<int>(P.size());
  std::vector<double> pi(n, 1.0 / n);
  for (int it = 0; it < 50000; ++it) {
    std::vector<double> next(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) next[j] += pi[i] * P[i][j];
    }
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff += std::fabs(next[i] - pi[i]);
    pi.swap(next);
    if (diff < 1e-14) break;
  }
  return pi;
}

}  // namespace

TEST_CASE("config validation names the violated bound") {
  NetworkConfig cfg;
  cfg.L = 1;
  CHECK_THROWS_AS(init_env(cfg, 0), ConfigError);
  try {
    init_env(cfg, 0);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("L") != std::string::npos);
  }
  NetworkConfig bad;
  bad.rho = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  NetworkConfig neg;
  neg.B = 0.0;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
}

TEST_CASE("identical config and seed give identical states") {
  NetworkConfig cfg;
  EnvState a = init_env(cfg, 7);
  EnvState b = init_env(cfg, 7);
  CHECK(a == b);
  for (int t = 0; t < 20; ++t) {
    advance(a, cfg);
    advance(b, cfg);
  }
  CHECK(a == b);
  EnvState c = init_env(cfg, 8);
  CHECK(!(a.channels_now == c.channels_now && a.tasks == c.tasks));
}

TEST_CASE("initial state indices stay inside [0, L)") {
  NetworkConfig cfg;
  EnvState st = init_env(cfg, 0);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      CHECK(st.channels_now.states.at(m, k) >= 0);
      CHECK(st.channels_now.states.at(m, k) < cfg.L);
      CHECK(st.channels_prev.states.at(m, k) >= 0);
      CHECK(st.channels_prev.states.at(m, k) < cfg.L);
    }
  }
}

TEST_CASE("transition matrix rows are stochastic and birth-death shaped") {
  NetworkConfig cfg;
  const auto P = transition_matrix(cfg);
  for (int i = 0; i < cfg.L; ++i) {
    double row = 0.0;
    for (int j = 0; j < cfg.L; ++j) {
      row += P[i][j];
      if (std::abs(i - j) > 1) CHECK(P[i][j] == 0.0);  // no two-state hops
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("self-transition frequency tracks the persistence probability") {
  NetworkConfig cfg;
  cfg.M = 1;
  cfg.K = 1;
  cfg.rho = 0.95;
  EnvState st = init_env(cfg, 11);
  int stay = 0;
  const int steps = 100000;
  int prev = st.channels_now.states.at(0, 0);
  for (int t = 0; t < steps; ++t) {
    step_channels(st, cfg);
    const int cur = st.channels_now.states.at(0, 0);
    if (cur == prev) ++stay;
    prev = cur;
  }
  CHECK(static_cast<double>(stay) / steps == doctest::Approx(cfg.rho).epsilon(0.02 / cfg.rho));
}

TEST_CASE("one-step moves stay adjacent") {
  NetworkConfig cfg;
  cfg.M = 1;
  cfg.K = 1;
  EnvState st = init_env(cfg, 3);
  for (int t = 0; t < 5000; ++t) {
    const int before = st.channels_now.states.at(0, 0);
    step_channels(st, cfg);
    const int after = st.channels_now.states.at(0, 0);
    CHECK(std::abs(after - before) <= 1);
  }
}

TEST_CASE("long-run histogram matches the chain's stationary distribution") {
  NetworkConfig cfg;
  cfg.M = 1;
  cfg.K = 1;
  const auto P = transition_matrix(cfg);
  const std::vector<double> pi = stationary(P);
  std::vector<double> hist(cfg.L, 0.0);
  EnvState st = init_env(cfg, 5);
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    step_channels(st, cfg);
    hist[st.channels_now.states.at(0, 0)] += 1.0;
  }
  double tv = 0.0;
  for (int i = 0; i < cfg.L; ++i) tv += std::fabs(hist[i] / steps - pi[i]);
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("empirical transition counts match P row-wise") {
  NetworkConfig cfg;
  cfg.M = 1;
  cfg.K = 1;
  const auto P = transition_matrix(cfg);
  std::vector<std::vector<double>> counts(cfg.L, std::vector<double>(cfg.L, 0.0));
  std::vector<double> visits(cfg.L, 0.0);
  EnvState st = init_env(cfg, 17);
  int prev = st.channels_now.states.at(0, 0);
  for (int t = 0; t < 100000; ++t) {
    step_channels(st, cfg);
    const int cur = st.channels_now.states.at(0, 0);
    counts[prev][cur] += 1.0;
    visits[prev] += 1.0;
    prev = cur;
  }
  for (int i = 0; i < cfg.L; ++i) {
    REQUIRE(visits[i] > 0);
    double tv = 0.0;
    for (int j = 0; j < cfg.L; ++j) tv += std::fabs(counts[i][j] / visits[i] - P[i][j]);
    CHECK(0.5 * tv < 0.02);
  }
}

TEST_CASE("task sampling") {
  NetworkConfig cfg;
  SUBCASE("zero spread is degenerate at the mean") {
    cfg.C_spread = 0.0;
    Rng rng(1);
    const TaskVector tasks = sample_tasks(cfg, rng);
    for (double c : tasks) CHECK(c == cfg.C_mean);
  }
  SUBCASE("rate times slot length gives the mean size") {
    // 2.7 Mbps over a 1 ms slot carries 2700 bits
    TomlDoc doc = parse_toml("[network]\ntask_rate = 2.7e6\n");
    const NetworkConfig loaded = NetworkConfig::from_toml(doc);
    CHECK(loaded.C_mean == doctest::Approx(2700.0));
  }
  SUBCASE("large-sample mean is close to C_mean") {
    cfg.C_spread = 0.5;
    Rng rng(2);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; i += cfg.K) {
      for (double c : sample_tasks(cfg, rng)) sum += c;
    }
    CHECK(sum / ((n + cfg.K - 1) / cfg.K * cfg.K) ==
          doctest::Approx(cfg.C_mean).epsilon(0.01));
  }
}

TEST_CASE("observation carries the delayed channel and the current tasks") {
  NetworkConfig cfg;
  EnvState st = init_env(cfg, 9);
  const ChannelState before_step = st.channels_now;
  step_channels(st, cfg);
  const Observation obs = observe(st, cfg);
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) {
      CHECK(obs.h_prev.at(m, k) == cfg.gain_levels[before_step.states.at(m, k)]);
      CHECK(obs.h_prev.at(m, k) > 0.0);
    }
  }
  CHECK(obs.C_now == st.tasks);

  // No leakage: scribbling over the current channels must not touch the
  // observation already taken.
  const Observation kept = obs;
  for (int m = 0; m < cfg.M; ++m) {
    for (int k = 0; k < cfg.K; ++k) st.channels_now.states.at(m, k) = 0;
  }
  CHECK(kept.h_prev.v == obs.h_prev.v);
  const Observation again = observe(st, cfg);
  CHECK(again.h_prev.v == obs.h_prev.v);  // still built from channels_prev
}

TEST_CASE("prev channels equal the previous now after any step") {
  NetworkConfig cfg;
  EnvState st = init_env(cfg, 21);
  for (int t = 0; t < 10; ++t) {
    const ChannelState now = st.channels_now;
    advance(st, cfg);
    CHECK(st.channels_prev == now);
  }
  CHECK(st.t == 10);
}

TEST_CASE("gain levels average to the mean path gain") {
  const auto levels = exp_quantile_gain_levels(8, 1e-5);
  REQUIRE(levels.size() == 8);
  double mean = 0.0;
  for (double g : levels) {
    CHECK(g > 0.0);
    mean += g / 8.0;
  }
  CHECK(mean == doctest::Approx(1e-5).epsilon(1e-9));
  for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i] > levels[i - 1]);
}

TEST_CASE("unknown network keys are rejected") {
  TomlDoc doc = parse_toml("[network]\nM = 2\nbogus = 1\n");
  CHECK_THROWS_AS(NetworkConfig::from_toml(doc), ConfigError);
  TomlDoc both = parse_toml("[network]\nC_mean = 2700\ntask_rate = 2.7e6\n");
  CHECK_THROWS_AS(NetworkConfig::from_toml(both), ConfigError);
}
