#pragma once

#include <span>
#include <vector>

#include "chronoskill/rng.hpp"
#include "chronoskill/tape.hpp"
#include "chronoskill/tensor.hpp"

namespace chronoskill {

// One dense layer: w is [in,out], b is {out}.
struct Linear {
  Tensor w, b;
  int in_dim() const { return w.rows(); }
  int out_dim() const { return w.cols(); }
};

// Uniform draw in [-sqrt(1/fan_in), +sqrt(1/fan_in)] per weight, row-major
// order; bias stays zero.
Linear init_linear(int in_dim, int out_dim, Rng& rng, double weight_scale = 1.0);

// x through every layer with tanh after each (numeric, no tape).
std::vector<double> mlp_hidden(const std::vector<Linear>& layers, std::span<const double> x);

// y = x*w + b for a single row, written into out.
void linear_apply(const Linear& layer, std::span<const double> x, std::span<double> out);

// Caches one tape leaf per parameter so repeated uses share a node.
class LeafCache {
 public:
  LeafCache(Tape& tape, const std::vector<Tensor*>& params)
      : tape_(tape), params_(params), vars_(params.size(), Var{-1}) {}

  Var leaf(int param_id) {
    Var& v = vars_[static_cast<std::size_t>(param_id)];
    if (v.id < 0) v = tape_.param(*params_[static_cast<std::size_t>(param_id)], param_id);
    return v;
  }

 private:
  Tape& tape_;
  const std::vector<Tensor*>& params_;
  std::vector<Var> vars_;
};

// Batched tanh MLP on the tape; layer parameters are identified by
// consecutive param ids starting at first_param_id (w then b per layer).
Var mlp_hidden_graph(Tape& tape, LeafCache& leaves, const std::vector<Linear>& layers,
                     int first_param_id, Var x);

}  // namespace chronoskill
