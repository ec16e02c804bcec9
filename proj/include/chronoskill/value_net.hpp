#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chronoskill/net.hpp"
#include "chronoskill/policy.hpp"

namespace chronoskill {

// State-value MLP. The vanilla variant sees the observation alone; the
// time-obs and multi-head variants get normalized time appended, since their
// returns are time-dependent.
class ValueNet {
 public:
  static ValueNet build(Variant variant, int obs_dim, int horizon,
                        const std::vector<int>& widths, std::uint64_t seed);

  int input_dim() const { return obs_dim_ + (variant_ == Variant::vanilla ? 0 : 1); }
  Variant variant() const { return variant_; }
  int obs_dim() const { return obs_dim_; }
  int horizon() const { return horizon_; }

  std::vector<double> input(std::span<const double> obs, int t) const;
  double forward(std::span<const double> obs, int t) const;

  std::vector<Tensor*> params();
  std::vector<const Tensor*> params() const;
  std::vector<std::string> param_names() const;

  // Batched graph forward: input_batch is [m, input_dim], result [m,1].
  Var forward_graph(Tape& tape, LeafCache& leaves, const Tensor& input_batch) const;

  std::vector<Linear> hidden;
  Linear out;

 private:
  ValueNet(Variant variant, int obs_dim, int horizon)
      : variant_(variant), obs_dim_(obs_dim), horizon_(horizon) {}

  Variant variant_;
  int obs_dim_;
  int horizon_;
};

}  // namespace chronoskill
