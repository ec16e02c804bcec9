#include "chronoskill/policy.hpp"

#include <cmath>

#include "chronoskill/error.hpp"

namespace chronoskill {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::vanilla: return "vanilla";
    case Variant::timeobs: return "timeobs";
    case Variant::multihead: return "multihead";
  }
  throw UsageError("unknown variant value");
}

Variant variant_from_string(const std::string& s) {
  if (s == "vanilla") return Variant::vanilla;
  if (s == "timeobs") return Variant::timeobs;
  if (s == "multihead") return Variant::multihead;
  throw FormatError("unknown policy variant '" + s + "' (expected vanilla|timeobs|multihead)");
}

void PolicyConfig::validate() const {
  if (obs_dim < 1 || action_dim < 1) {
    throw std::invalid_argument("policy config: obs_dim and action_dim must be positive");
  }
  if (horizon < 1) throw std::invalid_argument("policy config: horizon must be positive");
  if (heads < 1 || heads > horizon) {
    throw std::invalid_argument("policy config: need 1 <= heads <= horizon, got heads=" +
                                std::to_string(heads) + " horizon=" + std::to_string(horizon));
  }
  if (variant != Variant::multihead && heads != 1) {
    throw std::invalid_argument("policy config: variant " + to_string(variant) +
                                " requires heads == 1");
  }
  if (trunk_widths.empty()) throw std::invalid_argument("policy config: empty trunk_widths");
  for (int w : trunk_widths) {
    if (w < 1) throw std::invalid_argument("policy config: non-positive trunk width");
  }
}

int select_head(long long t, int horizon, int heads) {
  if (t < 0) throw std::invalid_argument("select_head: negative step " + std::to_string(t));
  if (heads < 1 || horizon < 1 || heads > horizon) {
    throw std::invalid_argument("select_head: need 1 <= heads <= horizon, got heads=" +
                                std::to_string(heads) + " horizon=" + std::to_string(horizon));
  }
  const long long j = t * static_cast<long long>(heads) / static_cast<long long>(horizon);
  return static_cast<int>(j < heads ? j : heads - 1);
}

Policy Policy::build(const PolicyConfig& config) {
  config.validate();
  Policy policy(config);
  Rng rng(config.seed);
  int in_dim = config.trunk_input_dim();
  for (int width : config.trunk_widths) {
    policy.trunk.push_back(init_linear(in_dim, width, rng));
    in_dim = width;
  }
  for (int h = 0; h < config.heads; ++h) {
    policy.heads.push_back(init_linear(in_dim, config.action_dim, rng, 0.01));
    Tensor logstd({config.action_dim});
    for (std::int64_t i = 0; i < logstd.size(); ++i) logstd[i] = -0.5;
    policy.logstds.push_back(std::move(logstd));
  }
  return policy;
}

std::vector<double> Policy::trunk_input(std::span<const double> obs, int t) const {
  if (static_cast<int>(obs.size()) != cfg_.obs_dim) {
    throw DimensionError("policy: observation length " + std::to_string(obs.size()) +
                         " does not match obs_dim " + std::to_string(cfg_.obs_dim));
  }
  std::vector<double> input(obs.begin(), obs.end());
  if (cfg_.variant == Variant::timeobs) {
    input.push_back(static_cast<double>(t) / static_cast<double>(cfg_.horizon));
  }
  return input;
}

ActionDistribution Policy::forward(std::span<const double> obs, int t) const {
  if (t < 0 || t >= cfg_.horizon) {
    throw std::invalid_argument("policy forward: step " + std::to_string(t) +
                                " outside [0," + std::to_string(cfg_.horizon) + ")");
  }
  const std::vector<double> input = trunk_input(obs, t);
  const std::vector<double> hidden = mlp_hidden(trunk, input);
  const int j =
      cfg_.variant == Variant::multihead ? select_head(t, cfg_.horizon, cfg_.heads) : 0;
  ActionDistribution dist;
  dist.mean.assign(static_cast<std::size_t>(cfg_.action_dim), 0.0);
  linear_apply(heads[static_cast<std::size_t>(j)], hidden, dist.mean);
  const Tensor& ls = logstds[static_cast<std::size_t>(j)];
  dist.logstd.assign(ls.data(), ls.data() + ls.size());
  dist.head_index = j;
  return dist;
}

std::vector<Tensor*> Policy::params() {
  std::vector<Tensor*> out;
  for (Linear& layer : trunk) {
    out.push_back(&layer.w);
    out.push_back(&layer.b);
  }
  for (std::size_t h = 0; h < heads.size(); ++h) {
    out.push_back(&heads[h].w);
    out.push_back(&heads[h].b);
    out.push_back(&logstds[h]);
  }
  return out;
}

std::vector<const Tensor*> Policy::params() const {
  auto mut = const_cast<Policy*>(this)->params();
  return {mut.begin(), mut.end()};
}

std::vector<std::string> Policy::param_names() const {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < trunk.size(); ++l) {
    out.push_back("policy.trunk." + std::to_string(l) + ".w");
    out.push_back("policy.trunk." + std::to_string(l) + ".b");
  }
  for (std::size_t h = 0; h < heads.size(); ++h) {
    out.push_back("policy.head." + std::to_string(h) + ".w");
    out.push_back("policy.head." + std::to_string(h) + ".b");
    out.push_back("policy.head." + std::to_string(h) + ".logstd");
  }
  return out;
}

Var Policy::logprob_graph(Tape& tape, LeafCache& leaves, const Tensor& input_batch, int head,
                          Tensor actions) const {
  const Var x = tape.input(input_batch);
  const Var hidden = mlp_hidden_graph(tape, leaves, trunk, 0, x);
  const int base = head_param_base(head);
  const Var mean = tape.affine(hidden, leaves.leaf(base), leaves.leaf(base + 1));
  return tape.gauss_logprob(mean, leaves.leaf(base + 2), std::move(actions));
}

Var Policy::logstd_leaf(Tape& tape, LeafCache& leaves, int head) const {
  (void)tape;
  return leaves.leaf(head_param_base(head) + 2);
}

std::pair<std::vector<double>, double> sample_action(const ActionDistribution& dist, Rng& rng) {
  std::vector<double> action(dist.mean.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    action[i] = dist.mean[i] + std::exp(dist.logstd[i]) * rng.normal();
  }
  const double logprob = gaussian_logprob(dist.mean, dist.logstd, action);
  return {std::move(action), logprob};
}

std::pair<double, double> log_prob_and_entropy(const Policy& policy, std::span<const double> obs,
                                               int t, std::span<const double> action) {
  const ActionDistribution dist = policy.forward(obs, t);
  if (action.size() != dist.mean.size()) {
    throw DimensionError("log_prob_and_entropy: action length " + std::to_string(action.size()) +
                         " vs action_dim " + std::to_string(dist.mean.size()));
  }
  return {gaussian_logprob(dist.mean, dist.logstd, action), gaussian_entropy(dist.logstd)};
}

}  // namespace chronoskill
