#include "mecsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "mecsim/errors.hpp"

namespace mecsim {

namespace fs = std::filesystem;

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "dqn") return PolicyKind::dqn;
  if (name == "ddpg") return PolicyKind::ddpg;
  if (name == "random") return PolicyKind::random_alloc;
  if (name == "local_only") return PolicyKind::local_only;
  if (name == "mec_only") return PolicyKind::mec_only;
  if (name == "best_assignment") return PolicyKind::best_assignment;
  throw ConfigError("unknown policy '" + name +
                    "' (dqn, ddpg, random, local_only, mec_only, best_assignment)");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::ddpg: return "ddpg";
    case PolicyKind::random_alloc: return "random";
    case PolicyKind::local_only: return "local_only";
    case PolicyKind::mec_only: return "mec_only";
    case PolicyKind::best_assignment: return "best_assignment";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  network.validate();
  solver.validate();
  dqn.validate();
  ddpg.validate();
  if (episodes < 1) throw ConfigError("experiment: episodes must be >= 1");
  if (slots < 1) throw ConfigError("experiment: slots must be >= 1");
  if (eval_episodes < 1) throw ConfigError("experiment: eval_episodes must be >= 1");
  if (out_dir.empty()) throw ConfigError("experiment: out_dir must not be empty");
}

ExperimentConfig ExperimentConfig::from_toml(const TomlDoc& doc) {
  require_sections(doc, {"network", "solver", "dqn", "ddpg", "experiment"});
  ExperimentConfig cfg;
  cfg.network = NetworkConfig::from_toml(doc);
  cfg.solver = SolverSettings::from_toml(doc);
  cfg.dqn = DqnAgentConfig::from_toml(doc);
  cfg.ddpg = DdpgAgentConfig::from_toml(doc);
  SectionReader r(doc, "experiment");
  cfg.policy = policy_kind_from_string(r.get_string("policy", to_string(cfg.policy)));
  cfg.episodes = r.get_int("episodes", cfg.episodes);
  cfg.slots = r.get_int("slots", cfg.slots);
  cfg.env_seed = static_cast<std::uint64_t>(r.get_int("env_seed", static_cast<long>(cfg.env_seed)));
  cfg.agent_seed =
      static_cast<std::uint64_t>(r.get_int("agent_seed", static_cast<long>(cfg.agent_seed)));
  cfg.eval_episodes = r.get_int("eval_episodes", cfg.eval_episodes);
  cfg.out_dir = r.get_string("out_dir", cfg.out_dir);
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_toml_file(const std::string& path) {
  return from_toml(parse_toml_file(path));
}

void ExperimentConfig::apply_base_seed(std::uint64_t base) {
  env_seed = derive_seed(base, 11);
  agent_seed = derive_seed(base, 12);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

void emit_csv(const Table& table, const std::string& path) {
  if (table.header.empty()) throw ContractError("emit_csv: empty table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write CSV: " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << quote_field(table.header[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << quote_field(row[i]);
    }
    out << '\n';
  }
  if (!out) throw ConfigError("failed while writing CSV: " + path);
}

Table parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_started = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
      row_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_started || !field.empty()) {
        row.push_back(field);
        field.clear();
        records.push_back(row);
        row.clear();
        row_started = false;
      }
    } else {
      field.push_back(c);
      row_started = true;
    }
  }
  if (row_started || !field.empty()) {
    row.push_back(field);
    records.push_back(row);
  }
  if (records.empty()) throw ConfigError("CSV has no header row: " + path);

  Table t;
  t.header = records.front();
  t.rows.assign(records.begin() + 1, records.end());
  return t;
}

namespace {

int column_index(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return static_cast<int>(i);
  }
  throw ContractError("table is missing column '" + name + "'");
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void emit_plot(const Table& table, const std::string& path) {
  if (table.header.empty() || table.rows.empty()) throw ContractError("emit_plot: empty table");
  const int c_axis = column_index(table, "axis");
  const int c_value = column_index(table, "value");
  const int c_policy = column_index(table, "policy");
  const int c_delay = column_index(table, "mean_delay_s");

  std::vector<std::string> policies;
  std::vector<std::vector<std::pair<double, double>>> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymax = 0.0;
  for (const auto& row : table.rows) {
    const double x = std::stod(row[c_value]);
    const double y = std::stod(row[c_delay]);
    const std::string& pol = row[c_policy];
    std::size_t idx = 0;
    for (; idx < policies.size(); ++idx) {
      if (policies[idx] == pol) break;
    }
    if (idx == policies.size()) {
      policies.push_back(pol);
      series.emplace_back();
    }
    series[idx].push_back({x, y});
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymax = std::max(ymax, y);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;

  const double W = 800, H = 520;
  const double ml = 80, mr = 180, mt = 30, mb = 60;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const int n_colors = 8;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << (H - mb) << "\" x2=\"" << (W - mr) << "\" y2=\""
      << (H - mb) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << (H - mb)
      << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / ticks;
    const double yv = ymax * i / ticks;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << (H - mb) << "\" x2=\"" << px(xv) << "\" y2=\""
        << (H - mb + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << (H - mb + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << format_double(xv) << "</text>\n";
    svg << "<line x1=\"" << (ml - 5) << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
        << py(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (ml - 8) << "\" y=\"" << (py(yv) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << format_double(yv) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 15)
      << "\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(table.rows[0][c_axis])
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + (H - mt - mb) / 2)
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (mt + (H - mt - mb) / 2) << ")\">mean delay (s)</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    auto pts = series[s];
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill=\"none\" stroke=\"" << palette[s % n_colors]
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << px(x) << "," << py(y) << " ";
    svg << "\"/>\n";
    const double ly = mt + 20 + 18 * static_cast<double>(s);
    svg << "<line x1=\"" << (W - mr + 15) << "\" y1=\"" << ly << "\" x2=\"" << (W - mr + 45)
        << "\" y2=\"" << ly << "\" stroke=\"" << palette[s % n_colors]
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (W - mr + 52) << "\" y=\"" << (ly + 4) << "\" font-size=\"12\">"
        << xml_escape(policies[s]) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write plot: " + path);
  out << svg.str();
  if (!out) throw ConfigError("failed while writing plot: " + path);
}

namespace {

Table metrics_table(const std::vector<MetricsRow>& rows) {
  Table t;
  t.header = {"episode", "mean_delay_s", "mean_reward", "exploration", "wall_s"};
  for (const MetricsRow& r : rows) {
    t.rows.push_back({std::to_string(r.episode), format_double(r.mean_delay),
                      format_double(r.mean_reward), format_double(r.exploration),
                      format_double(r.wall_s)});
  }
  return t;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// One greedy decision plus its report for the evaluation loop.
DelayReport eval_slot(PolicyKind kind, DqnAgent* dqn, DdpgAgent* ddpg, Rng& baseline_rng,
                      EnvState& env, const ExperimentConfig& cfg) {
  const Observation obs = observe(env, cfg.network);
  switch (kind) {
    case PolicyKind::dqn: {
      const std::vector<double> s = build_features(obs, cfg.network);
      const int a = dqn_select_action(dqn->q, s, 0.0, dqn->rng);
      const std::vector<int> assignment = decode_assignment(a, cfg.network.M, cfg.network.K);
      return solve_assignment(assignment, current_gains(env, cfg.network), env.tasks,
                              cfg.network, cfg.solver)
          .second;
    }
    case PolicyKind::ddpg: {
      const std::vector<double> s = build_features(obs, cfg.network);
      const std::vector<double> raw = ddpg_select_action(ddpg->actor, s, 0.0, ddpg->rng);
      const ControlDecision d = project_action(raw, obs, cfg.network);
      return evaluate(d, env.tasks, current_gains(env, cfg.network), cfg.network);
    }
    case PolicyKind::random_alloc:
    case PolicyKind::local_only:
    case PolicyKind::mec_only: {
      const BaselineKind bk = (kind == PolicyKind::random_alloc) ? BaselineKind::random_alloc
                              : (kind == PolicyKind::local_only) ? BaselineKind::local_only
                                                                 : BaselineKind::mec_only;
      const ControlDecision d = baseline_decide(bk, obs, cfg.network, baseline_rng);
      return evaluate(d, env.tasks, current_gains(env, cfg.network), cfg.network);
    }
    case PolicyKind::best_assignment: {
      const long count = [&] {
        long r = 1;
        for (int k = 0; k < cfg.network.K; ++k) r *= cfg.network.M;
        return r;
      }();
      if (count > 4096) throw ConfigError("best_assignment: M^K too large to enumerate");
      DelayReport best;
      best.slot_delay = std::numeric_limits<double>::infinity();
      for (long idx = 0; idx < count; ++idx) {
        const std::vector<int> assignment =
            decode_assignment(idx, cfg.network.M, cfg.network.K);
        DelayReport rep = solve_assignment(assignment, current_gains(env, cfg.network),
                                           env.tasks, cfg.network, cfg.solver)
                              .second;
        if (rep.slot_delay < best.slot_delay) best = rep;
      }
      return best;
    }
  }
  throw ContractError("eval_slot: unreachable");
}

}  // namespace

std::vector<MetricsRow> train_dqn(DqnAgent& agent, const ExperimentConfig& cfg) {
  std::vector<MetricsRow> rows;
  for (long ep = 0; ep < cfg.episodes; ++ep) {
    const double t0 = now_seconds();
    EnvState env = init_env(cfg.network, derive_seed(cfg.env_seed, stream::env_train, ep));
    double delay_sum = 0.0, reward_sum = 0.0;
    for (long t = 0; t < cfg.slots; ++t) {
      const SlotResult r = dqn_train_step(agent, env, cfg.network, cfg.solver);
      delay_sum += r.slot_delay;
      reward_sum += r.reward;
    }
    rows.push_back({ep, delay_sum / cfg.slots, reward_sum / cfg.slots, agent.epsilon(),
                    now_seconds() - t0});
  }
  return rows;
}

std::vector<MetricsRow> train_ddpg(DdpgAgent& agent, const ExperimentConfig& cfg) {
  std::vector<MetricsRow> rows;
  for (long ep = 0; ep < cfg.episodes; ++ep) {
    const double t0 = now_seconds();
    EnvState env = init_env(cfg.network, derive_seed(cfg.env_seed, stream::env_train, ep));
    double delay_sum = 0.0, reward_sum = 0.0;
    for (long t = 0; t < cfg.slots; ++t) {
      const SlotResult r = ddpg_train_step(agent, env, cfg.network);
      delay_sum += r.slot_delay;
      reward_sum += r.reward;
    }
    rows.push_back({ep, delay_sum / cfg.slots, reward_sum / cfg.slots, agent.cfg.sigma,
                    now_seconds() - t0});
  }
  return rows;
}

TrainingResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  const std::string metrics_path = (fs::path(cfg.out_dir) / "metrics.csv").string();
  {
    std::ofstream probe(metrics_path, std::ios::binary);
    if (!probe) throw ConfigError("cannot write metrics file: " + metrics_path);
  }

  TrainingResult res;
  res.metrics_path = metrics_path;
  switch (cfg.policy) {
    case PolicyKind::dqn: {
      DqnAgent agent(cfg.network, cfg.dqn, cfg.agent_seed);
      res.rows = train_dqn(agent, cfg);
      res.checkpoint_prefix = (fs::path(cfg.out_dir) / "agent").string();
      save_dqn_checkpoint(agent, res.checkpoint_prefix);
      break;
    }
    case PolicyKind::ddpg: {
      DdpgAgent agent(cfg.network, cfg.ddpg, cfg.agent_seed);
      res.rows = train_ddpg(agent, cfg);
      res.checkpoint_prefix = (fs::path(cfg.out_dir) / "agent").string();
      save_ddpg_checkpoint(agent, res.checkpoint_prefix);
      break;
    }
    default: {
      // Baseline rollouts: no learning, metrics only.
      for (long ep = 0; ep < cfg.episodes; ++ep) {
        const double t0 = now_seconds();
        EnvState env = init_env(cfg.network, derive_seed(cfg.env_seed, stream::env_train, ep));
        Rng rng(derive_seed(cfg.agent_seed, stream::rollout, ep));
        double delay_sum = 0.0, reward_sum = 0.0;
        for (long t = 0; t < cfg.slots; ++t) {
          const DelayReport rep = eval_slot(cfg.policy, nullptr, nullptr, rng, env, cfg);
          delay_sum += rep.slot_delay;
          reward_sum += rep.reward;
          advance(env, cfg.network);
        }
        res.rows.push_back(
            {ep, delay_sum / cfg.slots, reward_sum / cfg.slots, 0.0, now_seconds() - t0});
      }
      break;
    }
  }
  emit_csv(metrics_table(res.rows), metrics_path);
  return res;
}

EvalResult run_eval(const ExperimentConfig& cfg, PolicyKind kind,
                    const std::string& checkpoint_prefix) {
  cfg.validate();
  std::optional<DqnAgent> dqn;
  std::optional<DdpgAgent> ddpg;
  if (kind == PolicyKind::dqn) {
    if (checkpoint_prefix.empty())
      throw ConfigError("run_eval: dqn needs a checkpoint prefix");
    dqn.emplace(cfg.network, cfg.dqn, cfg.agent_seed);
    load_dqn_checkpoint(*dqn, checkpoint_prefix);
  } else if (kind == PolicyKind::ddpg) {
    if (checkpoint_prefix.empty())
      throw ConfigError("run_eval: ddpg needs a checkpoint prefix");
    ddpg.emplace(cfg.network, cfg.ddpg, cfg.agent_seed);
    load_ddpg_checkpoint(*ddpg, checkpoint_prefix);
  }

  EvalResult out;
  for (long ep = 0; ep < cfg.eval_episodes; ++ep) {
    EnvState env = init_env(cfg.network, derive_seed(cfg.env_seed, stream::env_eval, ep));
    Rng rng(derive_seed(cfg.agent_seed, stream::env_eval, ep));
    double delay_sum = 0.0;
    for (long t = 0; t < cfg.slots; ++t) {
      const DelayReport rep =
          eval_slot(kind, dqn ? &*dqn : nullptr, ddpg ? &*ddpg : nullptr, rng, env, cfg);
      delay_sum += rep.slot_delay;
      advance(env, cfg.network);
    }
    out.per_episode.push_back(delay_sum / cfg.slots);
  }
  double sum = 0.0;
  for (double d : out.per_episode) sum += d;
  out.mean_delay = sum / static_cast<double>(out.per_episode.size());
  double var = 0.0;
  for (double d : out.per_episode) var += (d - out.mean_delay) * (d - out.mean_delay);
  out.std_delay = std::sqrt(var / static_cast<double>(out.per_episode.size()));
  return out;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "task_rate") return SweepAxis::task_rate;
  if (name == "mec_capability") return SweepAxis::mec_capability;
  throw ConfigError("unknown sweep axis '" + name + "' (task_rate, mec_capability)");
}

Table sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
            const std::vector<std::string>& policy_specs) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  if (policy_specs.empty()) throw ConfigError("sweep: no policies given");

  Table t;
  t.header = {"axis", "value", "policy", "mean_delay_s", "std_delay_s", "episodes"};
  const std::string axis_name =
      (axis == SweepAxis::task_rate) ? "task_rate" : "mec_capability";

  for (double v : values) {
    ExperimentConfig point = cfg;
    if (axis == SweepAxis::task_rate) {
      point.network.C_mean = v * cfg.network.tau0;  // value in bits/s
    } else {
      point.network.E_max_mec = cfg.network.E_max_mec * v;  // value is a multiplier
    }
    point.network.validate();
    for (const std::string& spec : policy_specs) {
      std::string name = spec, ckpt;
      const std::size_t eq = spec.find('=');
      if (eq != std::string::npos) {
        name = spec.substr(0, eq);
        ckpt = spec.substr(eq + 1);
      }
      const PolicyKind kind = policy_kind_from_string(name);
      const EvalResult r = run_eval(point, kind, ckpt);
      t.rows.push_back({axis_name, format_double(v), name, format_double(r.mean_delay),
                        format_double(r.std_delay), std::to_string(cfg.eval_episodes)});
    }
  }
  return t;
}

}  // namespace mecsim
