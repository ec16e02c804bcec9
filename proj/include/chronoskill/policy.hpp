#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chronoskill/net.hpp"
#include "chronoskill/rng.hpp"
#include "chronoskill/tape.hpp"
#include "chronoskill/tensor.hpp"

namespace chronoskill {

enum class Variant { vanilla, timeobs, multihead };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct PolicyConfig {
  Variant variant = Variant::vanilla;
  int obs_dim = 0;
  int action_dim = 0;
  int heads = 1;    // k; forced to 1 unless multihead
  int horizon = 0;  // T
  std::vector<int> trunk_widths{64, 64};
  std::uint64_t seed = 0;

  int trunk_input_dim() const {
    return obs_dim + (variant == Variant::timeobs ? 1 : 0);
  }
  void validate() const;
  bool operator==(const PolicyConfig&) const = default;
};

struct ActionDistribution {
  std::vector<double> mean;
  std::vector<double> logstd;
  int head_index = 0;
};

// Active head at step t: floor(t*k/T) in exact integer arithmetic, clamped to
// k-1. Heads own contiguous step blocks of length floor(T/k) or ceil(T/k).
int select_head(long long t, int horizon, int heads);

class Policy {
 public:
  static Policy build(const PolicyConfig& config);

  const PolicyConfig& config() const { return cfg_; }

  ActionDistribution forward(std::span<const double> obs, int t) const;

  // Trunk input row for one step; appends normalized time for the
  // time-in-observation variant.
  std::vector<double> trunk_input(std::span<const double> obs, int t) const;

  // Parameters in a fixed order: trunk (w,b per layer), then per head
  // (w, b, logstd). Gradient maps and Adam state use the same indices.
  std::vector<Tensor*> params();
  std::vector<const Tensor*> params() const;
  std::vector<std::string> param_names() const;

  int head_param_base(int head) const {
    return 2 * static_cast<int>(trunk.size()) + 3 * head;
  }

  // Training path: per-row log-prob node {m} for a batch of transitions that
  // all use the same head. input_batch is [m, trunk_input_dim].
  Var logprob_graph(Tape& tape, LeafCache& leaves, const Tensor& input_batch, int head,
                    Tensor actions) const;

  Var logstd_leaf(Tape& tape, LeafCache& leaves, int head) const;

  std::vector<Linear> trunk;
  std::vector<Linear> heads;     // mean layers, one per head
  std::vector<Tensor> logstds;   // one {action_dim} vector per head

 private:
  explicit Policy(PolicyConfig cfg) : cfg_(std::move(cfg)) {}
  PolicyConfig cfg_;
};

// action = mean + exp(logstd) * z, z ~ N(0,I); logprob is evaluated on the
// unclipped action.
std::pair<std::vector<double>, double> sample_action(const ActionDistribution& dist, Rng& rng);

// Fresh forward at (obs,t) and Gaussian log-prob/entropy of the selected
// head (numeric; the differentiable path is logprob_graph).
std::pair<double, double> log_prob_and_entropy(const Policy& policy, std::span<const double> obs,
                                               int t, std::span<const double> action);

}  // namespace chronoskill
