#include "chronoskill/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "chronoskill/error.hpp"
#include "chronoskill/tape.hpp"

namespace chronoskill {

void PPOConfig::validate(int horizon) const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo config: gamma in (0,1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("ppo config: lambda in [0,1]");
  if (!(clip_ratio > 0.0)) throw std::invalid_argument("ppo config: clip_ratio must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("ppo config: lr must be positive");
  if (update_epochs < 1 || minibatch_size < 1) {
    throw std::invalid_argument("ppo config: epochs and minibatch size must be positive");
  }
  if (entropy_coef < 0.0 || value_coef < 0.0 || !(grad_clip > 0.0)) {
    throw std::invalid_argument("ppo config: non-negative coefficients and positive grad_clip");
  }
  if (total_iters < 0) throw std::invalid_argument("ppo config: negative iteration count");
  if (steps_per_iter < 1 || steps_per_iter % horizon != 0) {
    throw std::invalid_argument("ppo config: steps_per_iter (" + std::to_string(steps_per_iter) +
                                ") must be a positive multiple of the horizon (" +
                                std::to_string(horizon) + ")");
  }
}

RolloutBuffer collect_rollouts(const Policy& policy, const ValueNet& value_net,
                               const EnvSpec& spec, int n_steps, Rng& sample_rng, Rng& env_rng) {
  if (n_steps < 1 || n_steps % spec.horizon != 0) {
    throw std::invalid_argument("collect_rollouts: n_steps must be a positive multiple of T");
  }
  RolloutBuffer buf;
  buf.obs_dim = spec.obs_dim;
  buf.action_dim = spec.action_dim;
  buf.horizon = spec.horizon;
  buf.obs.reserve(static_cast<std::size_t>(n_steps) * spec.obs_dim);
  buf.actions.reserve(static_cast<std::size_t>(n_steps) * spec.action_dim);

  Env env(spec);
  const int episodes = n_steps / spec.horizon;
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env.reset(env_rng.next_u64());
    for (int t = 0; t < spec.horizon; ++t) {
      const ActionDistribution dist = policy.forward(obs, t);
      auto [action, logprob] = sample_action(dist, sample_rng);
      const double value = value_net.forward(obs, t);

      buf.obs.insert(buf.obs.end(), obs.begin(), obs.end());
      buf.actions.insert(buf.actions.end(), action.begin(), action.end());
      buf.logprobs.push_back(logprob);
      buf.values.push_back(value);
      buf.times.push_back(t);
      buf.head_indices.push_back(dist.head_index);
      buf.terminals.push_back(t == spec.horizon - 1 ? 1 : 0);

      const StepResult result = env.step(action);  // env clips to its bounds
      buf.rewards.push_back(result.reward);
      obs = result.observation;
    }
  }
  return buf;
}

void compute_gae(RolloutBuffer& buffer, double gamma, double lambda) {
  const std::int64_t n = buffer.size();
  if (static_cast<std::int64_t>(buffer.values.size()) != n) {
    throw UsageError("compute_gae: values and rewards differ in length");
  }
  buffer.advantages.assign(static_cast<std::size_t>(n), 0.0);
  buffer.returns.assign(static_cast<std::size_t>(n), 0.0);
  double next_adv = 0.0;
  for (std::int64_t i = n - 1; i >= 0; --i) {
    const double nonterminal = buffer.terminals[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
    const double next_value =
        (nonterminal != 0.0 && i + 1 < n) ? buffer.values[static_cast<std::size_t>(i + 1)] : 0.0;
    const double delta = buffer.rewards[static_cast<std::size_t>(i)] +
                         gamma * next_value * nonterminal -
                         buffer.values[static_cast<std::size_t>(i)];
    next_adv = delta + gamma * lambda * nonterminal * next_adv;
    buffer.advantages[static_cast<std::size_t>(i)] = next_adv;
    buffer.returns[static_cast<std::size_t>(i)] =
        next_adv + buffer.values[static_cast<std::size_t>(i)];
  }
}

namespace {

std::vector<Tensor> materialize_grads(const Gradients& grads,
                                      const std::vector<Tensor*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.push_back(grads.get_or_zero(static_cast<int>(i), params[i]->shape()));
  }
  return out;
}

}  // namespace

UpdateStats ppo_update(Policy& policy, ValueNet& value_net, AdamState& policy_opt,
                       AdamState& value_opt, const RolloutBuffer& buffer, const PPOConfig& cfg,
                       Rng& shuffle_rng) {
  const std::int64_t n = buffer.size();
  if (n == 0 || static_cast<std::int64_t>(buffer.advantages.size()) != n) {
    throw UsageError("ppo_update: buffer has no computed advantages");
  }
  const int k = policy.config().heads;
  UpdateStats stats;

  // Ratio sanity over the whole buffer before any gradient step.
  for (std::int64_t i = 0; i < n; ++i) {
    const auto [lp, ent] =
        log_prob_and_entropy(policy, buffer.obs_row(i), buffer.times[static_cast<std::size_t>(i)],
                             buffer.action_row(i));
    (void)ent;
    const double ratio = std::exp(lp - buffer.logprobs[static_cast<std::size_t>(i)]);
    stats.pre_ratio_max_err = std::max(stats.pre_ratio_max_err, std::abs(ratio - 1.0));
    if (std::abs(ratio - 1.0) > cfg.clip_ratio) stats.pre_clip_fraction += 1.0;
  }
  stats.pre_clip_fraction /= static_cast<double>(n);

  // Advantage normalization over the full buffer.
  double mean = 0.0;
  for (double a : buffer.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : buffer.advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
  std::vector<double> norm_adv(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    norm_adv[static_cast<std::size_t>(i)] =
        (buffer.advantages[static_cast<std::size_t>(i)] - mean) * inv_std;
  }
  if (!std::isfinite(inv_std)) {
    throw NumericError("ppo_update: non-finite advantage normalization");
  }

  const auto policy_params = policy.params();
  const auto value_params = value_net.params();
  const AdamConfig adam_cfg{.lr = cfg.lr};

  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  int minibatches = 0;
  for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream.
    for (std::int64_t i = n - 1; i > 0; --i) {
      const std::int64_t j =
          static_cast<std::int64_t>(shuffle_rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    for (std::int64_t start = 0; start < n; start += cfg.minibatch_size) {
      const std::int64_t m = std::min<std::int64_t>(cfg.minibatch_size, n - start);
      const std::span<const std::int64_t> batch(order.data() + start,
                                                static_cast<std::size_t>(m));

      // ---- policy surrogate ----
      Tape tape;
      LeafCache leaves(tape, policy_params);
      std::vector<std::vector<std::int64_t>> groups(static_cast<std::size_t>(k));
      for (std::int64_t idx : batch) {
        groups[static_cast<std::size_t>(buffer.head_indices[static_cast<std::size_t>(idx)])]
            .push_back(idx);
      }

      Var objective{-1};
      Var entropy_sum{-1};
      double clip_count = 0.0;
      double kl_sum = 0.0;
      const int in_dim = policy.config().trunk_input_dim();
      for (int h = 0; h < k; ++h) {
        const auto& g = groups[static_cast<std::size_t>(h)];
        if (g.empty()) continue;
        const int gm = static_cast<int>(g.size());
        Tensor inputs({gm, in_dim});
        Tensor acts({gm, buffer.action_dim});
        Tensor lp_old({gm});
        Tensor adv({gm});
        for (int r = 0; r < gm; ++r) {
          const std::int64_t idx = g[static_cast<std::size_t>(r)];
          const std::vector<double> row = policy.trunk_input(
              buffer.obs_row(idx), buffer.times[static_cast<std::size_t>(idx)]);
          std::copy(row.begin(), row.end(), inputs.data() + static_cast<std::size_t>(r) * in_dim);
          const auto arow = buffer.action_row(idx);
          std::copy(arow.begin(), arow.end(),
                    acts.data() + static_cast<std::size_t>(r) * buffer.action_dim);
          lp_old[r] = buffer.logprobs[static_cast<std::size_t>(idx)];
          adv[r] = norm_adv[static_cast<std::size_t>(idx)];
        }
        const Var lp = policy.logprob_graph(tape, leaves, inputs, h, std::move(acts));
        const Var delta = tape.sub_const(lp, std::move(lp_old));
        const Var ratio = tape.exp(delta);
        const Var unclipped = tape.mul_const(ratio, adv);
        const Var clipped =
            tape.mul_const(tape.clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio), adv);
        const Var term = tape.min(unclipped, clipped);
        const Var gsum = tape.sum(term);
        objective = objective.id < 0 ? gsum : tape.add(objective, gsum);

        const Var head_ent = gaussian_entropy(tape, policy.logstd_leaf(tape, leaves, h));
        const Var scaled_ent = tape.scale(head_ent, static_cast<double>(gm));
        entropy_sum = entropy_sum.id < 0 ? scaled_ent : tape.add(entropy_sum, scaled_ent);

        const Tensor& ratio_vals = tape.value(ratio);
        const Tensor& delta_vals = tape.value(delta);
        for (int r = 0; r < gm; ++r) {
          if (std::abs(ratio_vals[r] - 1.0) > cfg.clip_ratio) clip_count += 1.0;
          kl_sum += (ratio_vals[r] - 1.0) - delta_vals[r];
        }
      }

      const double inv_m = 1.0 / static_cast<double>(m);
      const Var surrogate_loss = tape.scale(objective, -inv_m);
      const Var entropy_mean = tape.scale(entropy_sum, inv_m);
      const Var policy_loss =
          tape.add(surrogate_loss, tape.scale(entropy_mean, -cfg.entropy_coef));

      const double surrogate_val = tape.value(surrogate_loss)[0];
      const double entropy_val = tape.value(entropy_mean)[0];
      if (!std::isfinite(surrogate_val) || !std::isfinite(entropy_val)) {
        throw NumericError("ppo_update: non-finite policy loss (surrogate=" +
                           std::to_string(surrogate_val) + ", entropy=" +
                           std::to_string(entropy_val) + ") at minibatch " +
                           std::to_string(minibatches));
      }

      std::vector<Tensor> policy_grads = materialize_grads(tape.backward(policy_loss),
                                                           policy_params);
      clip_grad_norm(policy_grads, cfg.grad_clip);
      adam_step(policy_params, policy_grads, policy_opt, adam_cfg);

      // ---- value regression ----
      Tape vtape;
      LeafCache vleaves(vtape, value_params);
      const int vin = value_net.input_dim();
      Tensor vinputs({static_cast<int>(m), vin});
      Tensor vtargets({static_cast<int>(m), 1});
      for (std::int64_t r = 0; r < m; ++r) {
        const std::int64_t idx = batch[static_cast<std::size_t>(r)];
        const std::vector<double> row =
            value_net.input(buffer.obs_row(idx), buffer.times[static_cast<std::size_t>(idx)]);
        std::copy(row.begin(), row.end(), vinputs.data() + static_cast<std::size_t>(r) * vin);
        vtargets[r] = buffer.returns[static_cast<std::size_t>(idx)];
      }
      const Var v = value_net.forward_graph(vtape, vleaves, vinputs);
      const Var verr = vtape.square(vtape.sub_const(v, std::move(vtargets)));
      const Var value_loss = vtape.scale(vtape.sum(verr), inv_m);
      const double value_loss_val = vtape.value(value_loss)[0];
      if (!std::isfinite(value_loss_val)) {
        throw NumericError("ppo_update: non-finite value loss at minibatch " +
                           std::to_string(minibatches));
      }

      std::vector<Tensor> value_grads = materialize_grads(vtape.backward(value_loss),
                                                          value_params);
      for (Tensor& g : value_grads) {
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] *= cfg.value_coef;
      }
      clip_grad_norm(value_grads, cfg.grad_clip);
      adam_step(value_params, value_grads, value_opt, adam_cfg);

      stats.policy_loss += surrogate_val;
      stats.entropy += entropy_val;
      stats.value_loss += value_loss_val;
      stats.clip_fraction += clip_count * inv_m;
      stats.approx_kl += kl_sum * inv_m;
      ++minibatches;
    }
  }

  const double inv_b = 1.0 / static_cast<double>(minibatches);
  stats.policy_loss *= inv_b;
  stats.value_loss *= inv_b;
  stats.entropy *= inv_b;
  stats.clip_fraction *= inv_b;
  stats.approx_kl *= inv_b;
  return stats;
}

Trainer::Trainer(EnvSpec spec, PolicyConfig policy_cfg, PPOConfig ppo_cfg,
                 std::uint64_t master_seed)
    : spec_(std::move(spec)),
      ppo_cfg_(ppo_cfg),
      policy_([&] {
        if (policy_cfg.seed == 0) policy_cfg.seed = derive_seed(master_seed, "policy");
        return Policy::build(policy_cfg);
      }()),
      value_(ValueNet::build(policy_cfg.variant, policy_cfg.obs_dim, policy_cfg.horizon,
                             policy_cfg.trunk_widths, derive_seed(master_seed, "value"))),
      policy_opt_(AdamState::init_like(policy_.params())),
      value_opt_(AdamState::init_like(value_.params())),
      sample_rng_(derive_seed(master_seed, "sample")),
      env_rng_(derive_seed(master_seed, "env")) {
  if (policy_.config().obs_dim != spec_.obs_dim ||
      policy_.config().action_dim != spec_.action_dim ||
      policy_.config().horizon != spec_.horizon) {
    throw DimensionError("trainer: policy config dims do not match env spec " +
                         to_string(spec_.name));
  }
  ppo_cfg_.validate(spec_.horizon);
}

UpdateStats Trainer::iterate() {
  RolloutBuffer buffer =
      collect_rollouts(policy_, value_, spec_, ppo_cfg_.steps_per_iter, sample_rng_, env_rng_);
  compute_gae(buffer, ppo_cfg_.gamma, ppo_cfg_.lambda);
  return ppo_update(policy_, value_, policy_opt_, value_opt_, buffer, ppo_cfg_, sample_rng_);
}

}  // namespace chronoskill
