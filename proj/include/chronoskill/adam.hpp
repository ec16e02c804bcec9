#pragma once

#include <cstdint>
#include <vector>

#include "chronoskill/tensor.hpp"

namespace chronoskill {

// First/second moment accumulators, one pair per parameter tensor.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t step = 0;

  static AdamState init_like(const std::vector<Tensor*>& params);
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update in place; increments state.step.
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& cfg);

double global_grad_norm(const std::vector<Tensor>& grads);

// Rescales all gradients so their global L2 norm is at most max_norm.
void clip_grad_norm(std::vector<Tensor>& grads, double max_norm);

}  // namespace chronoskill
