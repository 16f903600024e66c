// Command-line front end: train, eval, sweep, solve, check.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mecsim/checks.hpp"
#include "mecsim/errors.hpp"
#include "mecsim/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

mecsim::ExperimentConfig load_config(const std::string& config_path, bool seed_set,
                                     std::uint64_t seed, const std::string& out_dir) {
  mecsim::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = mecsim::ExperimentConfig::from_toml_file(config_path);
  if (seed_set) cfg.apply_base_seed(seed);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

int cmd_train(const mecsim::ExperimentConfig& cfg) {
  const mecsim::TrainingResult res = mecsim::run_training(cfg);
  const auto& rows = res.rows;
  const long n = static_cast<long>(rows.size());
  for (long i = 0; i < n; i += std::max<long>(1, n / 10)) {
    std::cout << "episode " << rows[i].episode << "  mean delay "
              << mecsim::format_double(rows[i].mean_delay) << " s  mean reward "
              << mecsim::format_double(rows[i].mean_reward) << "\n";
  }
  std::cout << "metrics: " << res.metrics_path << "\n";
  if (!res.checkpoint_prefix.empty())
    std::cout << "checkpoints: " << res.checkpoint_prefix << ".*.ckpt\n";
  return 0;
}

int cmd_eval(const mecsim::ExperimentConfig& cfg, const std::string& policy,
             const std::string& checkpoint) {
  const mecsim::PolicyKind kind = mecsim::policy_kind_from_string(policy);
  const mecsim::EvalResult r = mecsim::run_eval(cfg, kind, checkpoint);
  std::cout << policy << ": mean delay " << mecsim::format_double(r.mean_delay) << " s, std "
            << mecsim::format_double(r.std_delay) << " s over " << r.per_episode.size()
            << " episodes\n";
  return 0;
}

int cmd_sweep(const mecsim::ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, const std::vector<std::string>& policies) {
  const mecsim::Table table =
      mecsim::sweep(cfg, mecsim::sweep_axis_from_string(axis), values, policies);
  fs::create_directories(cfg.out_dir);
  const std::string csv_path = (fs::path(cfg.out_dir) / ("sweep_" + axis + ".csv")).string();
  const std::string svg_path = (fs::path(cfg.out_dir) / ("sweep_" + axis + ".svg")).string();
  mecsim::emit_csv(table, csv_path);
  mecsim::emit_plot(table, svg_path);
  std::cout << "sweep table: " << csv_path << "\nplot: " << svg_path << "\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& out_path) {
  std::ifstream in(instance_path);
  if (!in) throw mecsim::ConfigError("cannot open instance file: " + instance_path);
  json doc = json::parse(in);

  mecsim::SolveInstance base;
  base.B = doc.value("B", base.B);
  base.N0 = doc.value("N0", base.N0);
  base.kappa_u = doc.value("kappa_u", base.kappa_u);
  base.kappa_m = doc.value("kappa_m", base.kappa_m);
  base.D_k = doc.value("D_k", base.D_k);
  base.D_m = doc.value("D_m", base.D_m);
  base.R_cap = doc.value("R_cap", base.R_cap);
  if (!doc.contains("servers") || !doc["servers"].is_array() || doc["servers"].empty())
    throw mecsim::ConfigError("instance file needs a non-empty 'servers' array");

  mecsim::SolverSettings settings;
  json result;
  result["servers"] = json::array();
  double max_delay = 0.0;
  for (const json& srv : doc["servers"]) {
    mecsim::SolveInstance inst = base;
    inst.E_max_mec = srv.value("E_max_mec", 0.0);
    for (const json& u : srv.at("users")) {
      inst.users.push_back({u.at("C").get<double>(), u.at("gain").get<double>(),
                            u.at("E_max_user").get<double>()});
    }
    const mecsim::ServerSolution sol = mecsim::solve_server(inst, settings);
    json jsrv;
    jsrv["max_delay"] = sol.max_delay;
    jsrv["users"] = json::array();
    for (const mecsim::SingleUserSolution& s : sol.users) {
      jsrv["users"].push_back({{"alpha", s.alpha},
                               {"p_local", s.p_local},
                               {"p_tx", s.p_tx},
                               {"p_mec", s.p_mec},
                               {"t_local", s.t_local},
                               {"t_tx", s.t_tx},
                               {"t_mec", s.t_mec},
                               {"t_total", s.delay}});
    }
    result["servers"].push_back(jsrv);
    max_delay = std::max(max_delay, sol.max_delay);
  }
  result["max_delay"] = max_delay;

  const std::string text = result.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw mecsim::ConfigError("cannot write result file: " + out_path);
    out << text << "\n";
    std::cout << "result: " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mecsim: dynamic task offloading simulator and learning framework"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "TOML config file")->expected(1);
  app.add_flag_callback("--no-color", [] {});  // reserved
  auto* seed_opt = app.add_option("--seed", seed, "base seed deriving env and agent seeds");
  app.add_option("--out", out_dir, "output directory override");

  auto* train = app.add_subcommand("train", "train a policy and write metrics + checkpoints");
  std::string train_policy;
  train->add_option("--policy", train_policy, "dqn | ddpg | random | local_only | mec_only");

  auto* eval = app.add_subcommand("eval", "evaluate a policy greedily on fresh seeds");
  std::string eval_policy = "local_only", eval_ckpt;
  long eval_episodes = 0;
  eval->add_option("--policy", eval_policy, "policy to evaluate")->required();
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint prefix for dqn/ddpg");
  eval->add_option("--episodes", eval_episodes, "evaluation episodes override");

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate policies across a parameter axis");
  std::string sweep_axis = "task_rate";
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_policies;
  sweep_cmd->add_option("--axis", sweep_axis, "task_rate | mec_capability")->required();
  sweep_cmd->add_option("--values", sweep_values, "axis values")->required()->delimiter(',');
  sweep_cmd->add_option("--policies", sweep_policies, "policies, e.g. random,mec_only,dqn=out/agent")
      ->required()
      ->delimiter(',');

  auto* solve_cmd = app.add_subcommand("solve", "solve one allocation instance from JSON");
  std::string instance_path, solve_out;
  solve_cmd->add_option("--instance", instance_path, "JSON instance file")->required();
  solve_cmd->add_option("--out-file", solve_out, "write the result JSON here");

  auto* check_cmd = app.add_subcommand("check", "run the self-check property suites");
  std::uint64_t check_seed = 1234;
  check_cmd->add_option("--check-seed", check_seed, "seed for the property suites");

  try {
    app.parse(argc, argv);
    seed_set = seed_opt->count() > 0;

    if (check_cmd->parsed()) {
      return (mecsim::run_checks(std::cout, check_seed) == 0) ? 0 : 2;
    }
    if (solve_cmd->parsed()) {
      return cmd_solve(instance_path, solve_out);
    }

    mecsim::ExperimentConfig cfg = load_config(config_path, seed_set, seed, out_dir);
    if (train->parsed()) {
      if (!train_policy.empty()) cfg.policy = mecsim::policy_kind_from_string(train_policy);
      return cmd_train(cfg);
    }
    if (eval->parsed()) {
      if (eval_episodes > 0) cfg.eval_episodes = eval_episodes;
      return cmd_eval(cfg, eval_policy, eval_ckpt);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(cfg, sweep_axis, sweep_values, sweep_policies);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return (code == 0) ? 0 : 1;
  } catch (const mecsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
