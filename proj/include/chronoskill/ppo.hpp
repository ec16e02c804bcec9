#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chronoskill/adam.hpp"
#include "chronoskill/envs.hpp"
#include "chronoskill/policy.hpp"
#include "chronoskill/value_net.hpp"

namespace chronoskill {

// One PPO iteration of experience as parallel arrays; whole episodes only.
struct RolloutBuffer {
  int obs_dim = 0;
  int action_dim = 0;
  int horizon = 0;

  std::vector<double> obs;      // [n * obs_dim]
  std::vector<double> actions;  // [n * action_dim], unclipped
  std::vector<double> rewards;
  std::vector<double> logprobs;
  std::vector<double> values;
  std::vector<int> times;
  std::vector<int> head_indices;
  std::vector<std::uint8_t> terminals;

  std::vector<double> advantages;
  std::vector<double> returns;

  std::int64_t size() const { return static_cast<std::int64_t>(rewards.size()); }
  std::span<const double> obs_row(std::int64_t i) const {
    return {obs.data() + i * obs_dim, static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> action_row(std::int64_t i) const {
    return {actions.data() + i * action_dim, static_cast<std::size_t>(action_dim)};
  }
};

struct PPOConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_ratio = 0.2;
  double lr = 3e-4;
  int update_epochs = 10;
  int minibatch_size = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double grad_clip = 0.5;
  int steps_per_iter = 2000;
  int total_iters = 150;

  void validate(int horizon) const;
  bool operator==(const PPOConfig&) const = default;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  // Ratio diagnostics over the whole buffer before the first gradient step.
  double pre_ratio_max_err = 0.0;
  double pre_clip_fraction = 0.0;
};

// Runs whole episodes; stores the unclipped action with its log-prob, the
// value estimate, episode time and selected head per step. Episode reset
// seeds come from env_rng, action noise from sample_rng.
RolloutBuffer collect_rollouts(const Policy& policy, const ValueNet& value_net,
                               const EnvSpec& spec, int n_steps, Rng& sample_rng, Rng& env_rng);

// GAE with the horizon end treated as a true terminal (no bootstrap):
// delta_t = r_t + gamma*V_{t+1}*(1-term_t) - V_t,
// A_t = delta_t + gamma*lambda*(1-term_t)*A_{t+1}, R_t = A_t + V_t.
void compute_gae(RolloutBuffer& buffer, double gamma, double lambda);

// Clipped-surrogate update over shuffled minibatches. Advantages are
// normalized over the full buffer; each sample trains only its recorded
// head. Policy and value gradients are clipped and stepped separately.
UpdateStats ppo_update(Policy& policy, ValueNet& value_net, AdamState& policy_opt,
                       AdamState& value_opt, const RolloutBuffer& buffer, const PPOConfig& cfg,
                       Rng& shuffle_rng);

// Owns one training run: policy, value net, optimizer states and rng streams.
class Trainer {
 public:
  Trainer(EnvSpec spec, PolicyConfig policy_cfg, PPOConfig ppo_cfg, std::uint64_t master_seed);

  UpdateStats iterate();

  const Policy& policy() const { return policy_; }
  Policy& policy() { return policy_; }
  const ValueNet& value_net() const { return value_; }
  ValueNet& value_net() { return value_; }
  const EnvSpec& spec() const { return spec_; }
  const PPOConfig& ppo_config() const { return ppo_cfg_; }

 private:
  EnvSpec spec_;
  PPOConfig ppo_cfg_;
  Policy policy_;
  ValueNet value_;
  AdamState policy_opt_;
  AdamState value_opt_;
  Rng sample_rng_;
  Rng env_rng_;
};

}  // namespace chronoskill
