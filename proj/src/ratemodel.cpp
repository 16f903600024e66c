#include "mecsim/ratemodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mecsim/errors.hpp"

namespace mecsim {

ControlDecision ControlDecision::zeros(int M, int K) {
  ControlDecision d;
  d.alpha.assign(K, 0.0);
  d.p_local.assign(K, 0.0);
  d.p_tx.assign(K, 0.0);
  d.p_mec = Grid<double>(M, K, 0.0);
  d.assignment.assign(K, 0);
  return d;
}

double offload_rate(double p_tx, double gain, double B, double N0) {
  if (p_tx < 0.0 || gain < 0.0) throw std::domain_error("offload_rate: negative input");
  if (!(B > 0.0) || !(N0 > 0.0)) throw std::domain_error("offload_rate: B and N0 must be > 0");
  if (p_tx == 0.0) return 0.0;
  return B * std::log2(1.0 + p_tx * gain / N0);
}

double local_rate(double p_local, double kappa_u, double D_k) {
  if (p_local < 0.0) throw std::domain_error("local_rate: negative power");
  if (!(kappa_u > 0.0) || !(D_k > 0.0))
    throw std::domain_error("local_rate: kappa and cycles-per-bit must be > 0");
  return std::cbrt(p_local / kappa_u) / D_k;
}

double mec_rate(double p_mec, double kappa_m, double D_m) {
  if (p_mec < 0.0) throw std::domain_error("mec_rate: negative power");
  if (!(kappa_m > 0.0) || !(D_m > 0.0))
    throw std::domain_error("mec_rate: kappa and cycles-per-bit must be > 0");
  return std::cbrt(p_mec / kappa_m) / D_m;
}

namespace {

void check_decision(const ControlDecision& d, const TaskVector& tasks,
                    const Grid<double>& gains_now, const NetworkConfig& cfg) {
  const int M = cfg.M, K = cfg.K;
  if (static_cast<int>(d.alpha.size()) != K || static_cast<int>(d.p_local.size()) != K ||
      static_cast<int>(d.p_tx.size()) != K || static_cast<int>(d.assignment.size()) != K ||
      d.p_mec.rows != M || d.p_mec.cols != K)
    throw ContractError("evaluate: decision dimensions do not match config");
  if (static_cast<int>(tasks.size()) != K)
    throw ContractError("evaluate: task vector size mismatch");
  if (gains_now.rows != M || gains_now.cols != K)
    throw ContractError("evaluate: gain grid size mismatch");
  for (int k = 0; k < K; ++k) {
    if (!(d.alpha[k] >= 0.0 && d.alpha[k] <= 1.0))
      throw ContractError("evaluate: alpha out of [0, 1]");
    if (d.p_local[k] < 0.0 || d.p_tx[k] < 0.0)
      throw ContractError("evaluate: negative power");
    if (d.assignment[k] < 0 || d.assignment[k] >= M)
      throw ContractError("evaluate: assignment out of range");
    if (tasks[k] < 0.0) throw ContractError("evaluate: negative task size");
    for (int m = 0; m < M; ++m) {
      if (d.p_mec.at(m, k) < 0.0) throw ContractError("evaluate: negative server power");
      if (m != d.assignment[k] && d.p_mec.at(m, k) != 0.0)
        throw ContractError("evaluate: server power at a non-assigned server");
    }
  }
}

}  // namespace

DelayReport evaluate(const ControlDecision& d, const TaskVector& tasks,
                     const Grid<double>& gains_now, const NetworkConfig& cfg) {
  check_decision(d, tasks, gains_now, cfg);
  const int K = cfg.K;
  const double cap = cfg.R_cap;

  DelayReport rep;
  rep.t_local.assign(K, 0.0);
  rep.t_tx.assign(K, 0.0);
  rep.t_mec.assign(K, 0.0);
  rep.t_total.assign(K, 0.0);

  for (int k = 0; k < K; ++k) {
    const int m = d.assignment[k];
    const double load_local = d.alpha[k] * tasks[k];
    const double load_off = (1.0 - d.alpha[k]) * tasks[k];

    if (load_local > 0.0) {
      const double r = local_rate(d.p_local[k], cfg.kappa_u, cfg.D_k);
      rep.t_local[k] = (r > 0.0) ? load_local / r : cap;
    }
    double off_time = 0.0;
    if (load_off > 0.0) {
      const double ro = offload_rate(d.p_tx[k], gains_now.at(m, k), cfg.B, cfg.N0);
      const double rc = mec_rate(d.p_mec.at(m, k), cfg.kappa_m, cfg.D_m);
      rep.t_tx[k] = (ro > 0.0) ? load_off / ro : cap;
      rep.t_mec[k] = (rc > 0.0) ? load_off / rc : cap;
      // the cap stands in for "never finishes" and absorbs the other stage
      off_time = (ro > 0.0 && rc > 0.0) ? rep.t_tx[k] + rep.t_mec[k] : cap;
    }
    rep.t_total[k] = std::max(rep.t_local[k], off_time);
    rep.slot_delay = std::max(rep.slot_delay, rep.t_total[k]);
  }
  rep.reward = -std::min(rep.slot_delay, cap);
  return rep;
}

double energy_user(const ControlDecision& d, int k, const DelayReport& rep) {
  return d.p_local[k] * rep.t_local[k] + d.p_tx[k] * rep.t_tx[k];
}

double energy_mec(const ControlDecision& d, int m, const DelayReport& rep) {
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(d.assignment.size()); ++k) {
    if (d.assignment[k] == m) total += d.p_mec.at(m, k) * rep.t_mec[k];
  }
  return total;
}

}  // namespace mecsim
