#pragma once

#include <cstdint>
#include <string>

#include "chronoskill/envs.hpp"
#include "chronoskill/policy.hpp"
#include "chronoskill/ppo.hpp"

namespace chronoskill {

// Complete description of one training run. Serialized as flat `key = value`
// lines with dotted section keys; parse(emit(c)) == c.
struct RunConfig {
  EnvName env = EnvName::push_lite;
  PolicyConfig policy;  // obs/action/horizon are filled from the env at run time
  PPOConfig ppo;
  std::uint64_t master_seed = 1;
  std::string out_dir = "runs/out";
  int eval_episodes = 20;
  int eval_interval = 10;

  bool operator==(const RunConfig&) const = default;
};

std::string emit_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Env-tuned training defaults: the probe is tiny and trains on short
// iterations; the manipulation envs use the standard PPO budget.
RunConfig default_run_config(EnvName env, Variant variant, std::uint64_t master_seed);

// Policy config with dims resolved against the env spec; heads forced to 1
// for single-head variants and clamped to the horizon.
PolicyConfig resolve_policy_config(const RunConfig& cfg);

}  // namespace chronoskill
