#include "chronoskill/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "json.hpp"

#include "chronoskill/error.hpp"
#include "chronoskill/text.hpp"

namespace chronoskill {

namespace fs = std::filesystem;

namespace {

std::string fmt_fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string metrics_row(int iteration, long long env_steps, const EvalReport& eval,
                        const UpdateStats& stats) {
  std::string row = std::to_string(iteration);
  row += ',';
  row += std::to_string(env_steps);
  for (double v : {eval.mean_return, eval.return_std, eval.success_rate, stats.policy_loss,
                   stats.value_loss, stats.entropy, stats.clip_fraction, stats.approx_kl}) {
    row += ',';
    row += fmt_double(v);
  }
  row += '\n';
  return row;
}

std::string eval_log_line(int iteration, long long env_steps, const EvalReport& eval) {
  return "eval iter=" + std::to_string(iteration) + " env_steps=" + std::to_string(env_steps) +
         " mean_return=" + fmt_double(eval.mean_return) +
         " success_rate=" + fmt_double(eval.success_rate) + "\n";
}

}  // namespace

EvalReport evaluate(const Policy& policy, const EnvSpec& spec, int n_episodes,
                    std::uint64_t base_seed) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  if (policy.config().obs_dim != spec.obs_dim || policy.config().action_dim != spec.action_dim ||
      policy.config().horizon != spec.horizon) {
    throw DimensionError("evaluate: policy dims (obs=" + std::to_string(policy.config().obs_dim) +
                         ",act=" + std::to_string(policy.config().action_dim) +
                         ",T=" + std::to_string(policy.config().horizon) +
                         ") do not match env " + to_string(spec.name));
  }
  EvalReport report;
  report.episodes = n_episodes;
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(n_episodes));
  Env env(spec);
  int successes = 0;
  for (int e = 0; e < n_episodes; ++e) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(e);
    report.seeds.push_back(seed);
    std::vector<double> obs = env.reset(seed);
    double ep_return = 0.0;
    bool ep_success = false;
    for (int t = 0; t < spec.horizon; ++t) {
      const ActionDistribution dist = policy.forward(obs, t);
      const StepResult result = env.step(dist.mean);
      ep_return += result.reward;
      ep_success = ep_success || result.success;
      obs = result.observation;
    }
    returns.push_back(ep_return);
    successes += ep_success ? 1 : 0;
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(n_episodes);
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n_episodes);
  report.mean_return = mean;
  report.return_std = std::sqrt(var);
  report.success_rate = static_cast<double>(successes) / static_cast<double>(n_episodes);
  return report;
}

EvalReport evaluate_checkpoint(const std::string& ckpt_path, const EnvSpec& spec, int n_episodes,
                               std::uint64_t base_seed) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  return evaluate(ckpt.policy, spec, n_episodes, base_seed);
}

void dump_trajectory(const Policy& policy, const EnvSpec& spec, std::uint64_t seed,
                     const std::string& out_path) {
  if (policy.config().obs_dim != spec.obs_dim || policy.config().action_dim != spec.action_dim) {
    throw DimensionError("dump_trajectory: policy dims do not match env " + to_string(spec.name));
  }
  Env env(spec);
  std::vector<double> obs = env.reset(seed);
  std::string out;
  for (int t = 0; t < spec.horizon; ++t) {
    const EnvState& s = env.state();
    const ActionDistribution dist = policy.forward(obs, t);
    nlohmann::ordered_json record;
    record["t"] = t;
    record["head_index"] = dist.head_index;
    record["p"] = {s.agent[0], s.agent[1]};
    record["o"] = {s.object[0], s.object[1]};
    record["g"] = {s.goal[0], s.goal[1]};
    record["held"] = s.held;
    record["action"] = dist.mean;
    const StepResult result = env.step(dist.mean);
    record["reward"] = result.reward;
    record["success"] = result.success;
    out += record.dump();
    out += '\n';
    obs = result.observation;
  }
  write_text_file(out_path, out);
}

void dump_trajectory_checkpoint(const std::string& ckpt_path, const EnvSpec& spec,
                                std::uint64_t seed, const std::string& out_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  dump_trajectory(ckpt.policy, spec, seed, out_path);
}

RunArtifacts run_training(const RunConfig& cfg) {
  if (cfg.eval_episodes < 1) throw std::invalid_argument("run config: eval_episodes must be >= 1");
  if (cfg.eval_interval < 1) throw std::invalid_argument("run config: eval_interval must be >= 1");
  const PolicyConfig pcfg = resolve_policy_config(cfg);
  const EnvSpec spec = make_env_spec(cfg.env);

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());

  RunArtifacts art;
  art.config_path = (fs::path(cfg.out_dir) / "config.txt").string();
  art.metrics_csv = (fs::path(cfg.out_dir) / "metrics.csv").string();
  art.checkpoint_path = (fs::path(cfg.out_dir) / "final.ckpt").string();
  const std::string log_path = (fs::path(cfg.out_dir) / "run.log").string();
  write_text_file(art.config_path, emit_config(cfg));

  Trainer trainer(spec, pcfg, cfg.ppo, cfg.master_seed);
  const std::uint64_t eval_base = derive_seed(cfg.master_seed, "eval");

  std::string csv = std::string(kMetricsCsvHeader) + "\n";
  std::string log = "config:\n" + emit_config(cfg);

  EvalReport eval = evaluate(trainer.policy(), spec, cfg.eval_episodes, eval_base);
  csv += metrics_row(0, 0, eval, UpdateStats{});
  log += eval_log_line(0, 0, eval);

  try {
    for (int iter = 1; iter <= cfg.ppo.total_iters; ++iter) {
      const UpdateStats stats = trainer.iterate();
      art.max_pre_ratio_err = std::max(art.max_pre_ratio_err, stats.pre_ratio_max_err);
      art.max_pre_clip_fraction = std::max(art.max_pre_clip_fraction, stats.pre_clip_fraction);
      const long long env_steps =
          static_cast<long long>(iter) * static_cast<long long>(cfg.ppo.steps_per_iter);
      if (iter % cfg.eval_interval == 0 || iter == cfg.ppo.total_iters) {
        eval = evaluate(trainer.policy(), spec, cfg.eval_episodes, eval_base);
        log += eval_log_line(iter, env_steps, eval);
      }
      csv += metrics_row(iter, env_steps, eval, stats);
    }
  } catch (const std::exception& e) {
    log += std::string("error: ") + e.what() + "\n";
    write_text_file(art.metrics_csv, csv);
    write_text_file(log_path, log);
    throw;
  }

  save_checkpoint(trainer.policy(), trainer.value_net(), art.checkpoint_path);
  log += "checkpoint: final.ckpt\n";
  write_text_file(art.metrics_csv, csv);
  write_text_file(log_path, log);
  art.final_eval = eval;
  return art;
}

VariantAggregate ComparisonTable::aggregate(EnvName env, Variant variant) const {
  VariantAggregate agg;
  std::vector<double> succ, ret;
  for (const CellResult& cell : cells) {
    if (cell.env != env || cell.variant != variant || cell.failed) continue;
    succ.push_back(cell.report.success_rate);
    ret.push_back(cell.report.mean_return);
  }
  agg.cells = static_cast<int>(succ.size());
  if (agg.cells == 0) return agg;
  const double n = static_cast<double>(agg.cells);
  for (double v : succ) agg.success_mean += v;
  for (double v : ret) agg.return_mean += v;
  agg.success_mean /= n;
  agg.return_mean /= n;
  for (double v : succ) agg.success_std += (v - agg.success_mean) * (v - agg.success_mean);
  for (double v : ret) agg.return_std += (v - agg.return_mean) * (v - agg.return_mean);
  agg.success_std = std::sqrt(agg.success_std / n);
  agg.return_std = std::sqrt(agg.return_std / n);
  return agg;
}

double ComparisonTable::headline(EnvName env, Variant variant) const {
  const VariantAggregate agg = aggregate(env, variant);
  return env == EnvName::two_phase_probe ? agg.return_mean : agg.success_mean;
}

bool ComparisonTable::verdict_beats(EnvName env, Variant challenger, Variant baseline) const {
  return headline(env, challenger) > headline(env, baseline);
}

ComparisonTable compare(const std::vector<EnvName>& envs, const std::vector<Variant>& variants,
                        int seeds, const CompareOptions& options) {
  if (seeds < 1) throw std::invalid_argument("compare: need at least one seed");
  if (envs.empty() || variants.empty()) {
    throw std::invalid_argument("compare: empty env or variant list");
  }
  ComparisonTable table;
  table.envs = envs;
  table.variants = variants;
  table.seeds = seeds;
  for (EnvName env : envs) {
    for (Variant variant : variants) {
      for (int s = 0; s < seeds; ++s) {
        CellResult cell;
        cell.env = env;
        cell.variant = variant;
        cell.seed_index = s;
        cell.cell_seed = derive_seed(options.master_seed, to_string(env) + "/" +
                                                              to_string(variant) + "/" +
                                                              std::to_string(s));
        table.cells.push_back(cell);
      }
    }
  }

  auto run_cell = [&](CellResult& cell) {
    try {
      RunConfig cfg = default_run_config(cell.env, cell.variant, cell.cell_seed);
      if (options.override_iters >= 0) cfg.ppo.total_iters = options.override_iters;
      if (options.override_heads > 0) cfg.policy.heads = options.override_heads;
      if (options.eval_episodes > 0) cfg.eval_episodes = options.eval_episodes;
      cfg.out_dir = (fs::path(options.out_dir) / to_string(cell.env) / to_string(cell.variant) /
                     ("seed" + std::to_string(cell.seed_index)))
                        .string();
      const RunArtifacts art = run_training(cfg);
      cell.report = art.final_eval;
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (CellResult& cell : table.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= table.cells.size()) break;
        run_cell(table.cells[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }

  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + options.out_dir + ": " + ec.message());
  write_text_file((fs::path(options.out_dir) / "compare.csv").string(), comparison_csv(table));
  write_text_file((fs::path(options.out_dir) / "compare.txt").string(),
                  comparison_table_text(table));
  return table;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "env,variant,seed_index,cell_seed,mean_return,return_std,success_rate,status\n";
  for (const CellResult& cell : table.cells) {
    out += to_string(cell.env) + "," + to_string(cell.variant) + "," +
           std::to_string(cell.seed_index) + "," + std::to_string(cell.cell_seed) + "," +
           fmt_double(cell.report.mean_return) + "," + fmt_double(cell.report.return_std) + "," +
           fmt_double(cell.report.success_rate) + "," + (cell.failed ? "failed" : "ok") + "\n";
  }
  return out;
}

std::string comparison_table_text(const ComparisonTable& table) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %-10s %-20s %-22s %s\n", "env", "variant",
                "success(mean+-std)", "return(mean+-std)", "cells");
  out += buf;
  for (EnvName env : table.envs) {
    for (Variant variant : table.variants) {
      const VariantAggregate agg = table.aggregate(env, variant);
      const std::string succ = fmt_fixed(agg.success_mean, 4) + " +- " +
                               fmt_fixed(agg.success_std, 4);
      const std::string ret = fmt_fixed(agg.return_mean, 3) + " +- " +
                              fmt_fixed(agg.return_std, 3);
      std::snprintf(buf, sizeof(buf), "%-18s %-10s %-20s %-22s %d\n", to_string(env).c_str(),
                    to_string(variant).c_str(), succ.c_str(), ret.c_str(), agg.cells);
      out += buf;
    }
  }
  for (const CellResult& cell : table.cells) {
    if (cell.failed) {
      out += "failed: " + to_string(cell.env) + "/" + to_string(cell.variant) + "/seed" +
             std::to_string(cell.seed_index) + ": " + cell.error + "\n";
    }
  }

  auto has = [&table](Variant v) {
    for (Variant x : table.variants) {
      if (x == v) return true;
    }
    return false;
  };
  out += "\ndirectional verdicts (headline: success rate, mean return for the probe):\n";
  for (EnvName env : table.envs) {
    auto line = [&](Variant a, Variant b, const char* rel, bool yes, double va, double vb) {
      out += "  " + to_string(env) + ": " + to_string(a) + " " + rel + " " + to_string(b) + ": " +
             (yes ? "YES" : "NO") + " (" + fmt_fixed(va, 4) + " vs " + fmt_fixed(vb, 4) + ")\n";
    };
    if (has(Variant::multihead) && has(Variant::vanilla)) {
      line(Variant::multihead, Variant::vanilla, ">",
           table.verdict_beats(env, Variant::multihead, Variant::vanilla),
           table.headline(env, Variant::multihead), table.headline(env, Variant::vanilla));
    }
    if (has(Variant::timeobs) && has(Variant::vanilla)) {
      line(Variant::timeobs, Variant::vanilla, ">",
           table.verdict_beats(env, Variant::timeobs, Variant::vanilla),
           table.headline(env, Variant::timeobs), table.headline(env, Variant::vanilla));
    }
    if (has(Variant::multihead) && has(Variant::timeobs)) {
      line(Variant::multihead, Variant::timeobs, ">=",
           !table.verdict_beats(env, Variant::timeobs, Variant::multihead),
           table.headline(env, Variant::multihead), table.headline(env, Variant::timeobs));
    }
  }
  return out;
}

}  // namespace chronoskill
