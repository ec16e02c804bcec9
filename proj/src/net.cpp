#include "chronoskill/net.hpp"

#include <cmath>

namespace chronoskill {

Linear init_linear(int in_dim, int out_dim, Rng& rng, double weight_scale) {
  Linear layer{Tensor({in_dim, out_dim}), Tensor({out_dim})};
  const double bound = std::sqrt(1.0 / static_cast<double>(in_dim));
  for (std::int64_t i = 0; i < layer.w.size(); ++i) {
    layer.w[i] = weight_scale * rng.uniform(-bound, bound);
  }
  return layer;
}

void linear_apply(const Linear& layer, std::span<const double> x, std::span<double> out) {
  const int in = layer.in_dim(), cols = layer.out_dim();
  if (static_cast<int>(x.size()) != in || static_cast<int>(out.size()) != cols) {
    throw DimensionError("linear_apply: input length " + std::to_string(x.size()) +
                         " vs layer " + layer.w.shape_str());
  }
  for (int j = 0; j < cols; ++j) out[j] = layer.b[j];
  for (int i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* wi = layer.w.data() + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) out[j] += xi * wi[j];
  }
}

std::vector<double> mlp_hidden(const std::vector<Linear>& layers, std::span<const double> x) {
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const Linear& layer : layers) {
    next.assign(static_cast<std::size_t>(layer.out_dim()), 0.0);
    linear_apply(layer, cur, next);
    for (double& v : next) v = std::tanh(v);
    cur.swap(next);
  }
  return cur;
}

Var mlp_hidden_graph(Tape& tape, LeafCache& leaves, const std::vector<Linear>& layers,
                     int first_param_id, Var x) {
  Var h = x;
  int pid = first_param_id;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Var w = leaves.leaf(pid++);
    const Var b = leaves.leaf(pid++);
    h = tape.tanh(tape.affine(h, w, b));
  }
  return h;
}

}  // namespace chronoskill
