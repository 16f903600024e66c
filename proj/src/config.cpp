#include "mecsim/config.hpp"

#include <cmath>

#include "mecsim/errors.hpp"

namespace mecsim {

std::vector<double> exp_quantile_gain_levels(int L, double g0) {
  if (L < 2) throw ConfigError("gain levels: L must be >= 2");
  if (g0 <= 0.0) throw ConfigError("gain levels: g0 must be > 0");
  std::vector<double> levels(L);
  for (int i = 0; i < L; ++i) {
    const double pa = 1.0 - static_cast<double>(i) / L;  // P(X >= lower quantile)
    const double a = -std::log(pa);
    double mean;
    if (i == L - 1) {
      mean = a + 1.0;  // memoryless tail
    } else {
      const double pb = 1.0 - static_cast<double>(i + 1) / L;
      const double b = -std::log(pb);
      mean = ((a + 1.0) * pa - (b + 1.0) * pb) / (pa - pb);
    }
    levels[i] = g0 * mean;
  }
  return levels;
}

NetworkConfig::NetworkConfig() {
  gain_levels = exp_quantile_gain_levels(L, g0);
  R_cap = 10.0 * tau0;
}

void NetworkConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw ConfigError(std::string("network config: ") + name + " must be > 0");
  };
  if (M < 1) throw ConfigError("network config: M must be >= 1");
  if (K < 1) throw ConfigError("network config: K must be >= 1");
  if (L < 2) throw ConfigError("network config: L must be >= 2");
  positive(B, "B");
  positive(N0, "N0");
  positive(kappa_u, "kappa_u");
  positive(kappa_m, "kappa_m");
  positive(D_k, "D_k");
  positive(D_m, "D_m");
  positive(E_max_user, "E_max_user");
  positive(E_max_mec, "E_max_mec");
  positive(tau0, "tau0");
  positive(C_mean, "C_mean");
  positive(g0, "g0");
  positive(R_cap, "R_cap");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("network config: rho must be in [0, 1)");
  if (!(C_spread >= 0.0 && C_spread < 1.0))
    throw ConfigError("network config: C_spread must be in [0, 1)");
  if (static_cast<int>(gain_levels.size()) != L)
    throw ConfigError("network config: gain_levels must hold exactly L entries");
  double prev = 0.0;
  for (double g : gain_levels) {
    if (!(g > prev)) {
      throw ConfigError("network config: gain_levels must be strictly increasing and positive");
    }
    prev = g;
  }
}

NetworkConfig NetworkConfig::from_toml(const TomlDoc& doc) {
  NetworkConfig cfg;
  SectionReader net(doc, "network");
  cfg.M = static_cast<int>(net.get_int("M", cfg.M));
  cfg.K = static_cast<int>(net.get_int("K", cfg.K));
  cfg.B = net.get_double("B", cfg.B);
  cfg.N0 = net.get_double("N0", cfg.N0);
  cfg.kappa_u = net.get_double("kappa_u", cfg.kappa_u);
  cfg.kappa_m = net.get_double("kappa_m", cfg.kappa_m);
  cfg.D_k = net.get_double("D_k", cfg.D_k);
  cfg.D_m = net.get_double("D_m", cfg.D_m);
  cfg.E_max_user = net.get_double("E_max_user", cfg.E_max_user);
  cfg.E_max_mec = net.get_double("E_max_mec", cfg.E_max_mec);
  cfg.tau0 = net.get_double("tau0", cfg.tau0);
  cfg.C_spread = net.get_double("C_spread", cfg.C_spread);
  cfg.L = static_cast<int>(net.get_int("L", cfg.L));
  cfg.rho = net.get_double("rho", cfg.rho);
  cfg.g0 = net.get_double("g0", cfg.g0);

  if (net.has("C_mean") && net.has("task_rate"))
    throw ConfigError("[network] give either C_mean or task_rate, not both");
  if (net.has("task_rate")) {
    cfg.C_mean = net.get_double("task_rate", 0.0) * cfg.tau0;
  } else {
    cfg.C_mean = net.get_double("C_mean", cfg.C_mean);
  }

  if (net.has("gain_levels")) {
    cfg.gain_levels = net.get_array("gain_levels", {});
  } else if (cfg.L >= 2 && cfg.g0 > 0.0) {
    cfg.gain_levels = exp_quantile_gain_levels(cfg.L, cfg.g0);
  }
  cfg.R_cap = net.has("R_cap") ? net.get_double("R_cap", 0.0) : 10.0 * cfg.tau0;

  net.finish();
  cfg.validate();
  return cfg;
}

}  // namespace mecsim
