#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronoskill/checkpoint.hpp"
#include "chronoskill/config.hpp"
#include "chronoskill/envs.hpp"
#include "chronoskill/ppo.hpp"

namespace chronoskill {

inline constexpr const char* kMetricsCsvHeader =
    "iteration,env_steps,mean_return,return_std,success_rate,policy_loss,value_loss,entropy,"
    "clip_fraction,approx_kl";

struct EvalReport {
  double mean_return = 0.0;
  double return_std = 0.0;
  double success_rate = 0.0;
  int episodes = 0;
  std::vector<std::uint64_t> seeds;
};

struct RunArtifacts {
  std::string metrics_csv;
  std::string checkpoint_path;
  std::string config_path;
  EvalReport final_eval;
  // Worst pre-update ratio deviation seen across all iterations (A-gate diag).
  double max_pre_ratio_err = 0.0;
  double max_pre_clip_fraction = 0.0;
};

// Trains per the config, writing metrics.csv (one row per iteration plus the
// initial evaluation row), config.txt, run.log and final.ckpt under
// cfg.out_dir. Deterministic: identical configs produce identical bytes.
RunArtifacts run_training(const RunConfig& cfg);

// Deterministic (mean-action) evaluation on reset seeds base..base+n-1.
EvalReport evaluate(const Policy& policy, const EnvSpec& spec, int n_episodes,
                    std::uint64_t base_seed);
EvalReport evaluate_checkpoint(const std::string& ckpt_path, const EnvSpec& spec, int n_episodes,
                               std::uint64_t base_seed);

// One deterministic episode as line-delimited JSON records with fields
// {t, head_index, p, o, g, held, action, reward, success} in that order.
void dump_trajectory(const Policy& policy, const EnvSpec& spec, std::uint64_t seed,
                     const std::string& out_path);
void dump_trajectory_checkpoint(const std::string& ckpt_path, const EnvSpec& spec,
                                std::uint64_t seed, const std::string& out_path);

struct CellResult {
  EnvName env;
  Variant variant;
  int seed_index = 0;
  std::uint64_t cell_seed = 0;
  bool failed = false;
  std::string error;
  EvalReport report;
};

struct VariantAggregate {
  double success_mean = 0.0, success_std = 0.0;
  double return_mean = 0.0, return_std = 0.0;
  int cells = 0;
};

struct ComparisonTable {
  std::vector<EnvName> envs;
  std::vector<Variant> variants;
  int seeds = 0;
  std::vector<CellResult> cells;

  VariantAggregate aggregate(EnvName env, Variant variant) const;
  // Headline comparison metric: success rate for the manipulation envs,
  // mean return for the probe (its success predicate is unused).
  double headline(EnvName env, Variant variant) const;
  bool verdict_beats(EnvName env, Variant challenger, Variant baseline) const;
};

struct CompareOptions {
  std::uint64_t master_seed = 1;
  std::string out_dir = "runs/compare";
  int override_iters = -1;  // <0 keeps per-env defaults
  int override_heads = -1;
  int eval_episodes = -1;
  int jobs = 1;
};

// Full env x variant x seed matrix; each cell trains and evaluates under its
// own derived seed. Failures are recorded per cell and do not stop the
// matrix. Writes compare.csv and compare.txt under options.out_dir.
ComparisonTable compare(const std::vector<EnvName>& envs, const std::vector<Variant>& variants,
                        int seeds, const CompareOptions& options);

std::string comparison_csv(const ComparisonTable& table);
std::string comparison_table_text(const ComparisonTable& table);

}  // namespace chronoskill
