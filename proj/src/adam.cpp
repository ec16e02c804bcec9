#include "chronoskill/adam.hpp"

#include <cmath>

namespace chronoskill {

AdamState AdamState::init_like(const std::vector<Tensor*>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Tensor* p : params) {
    st.m.push_back(Tensor::zeros_like(*p));
    st.v.push_back(Tensor::zeros_like(*p));
  }
  return st;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adam_step: got " + std::to_string(params.size()) + " params, " +
                         std::to_string(grads.size()) + " grads, " +
                         std::to_string(state.m.size()) + " accumulators");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g) || !p.same_shape(state.m[i])) {
      throw DimensionError("adam_step: param " + std::to_string(i) + " shape " + p.shape_str() +
                           " vs grad " + g.shape_str());
    }
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::int64_t k = 0; k < p.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

double global_grad_norm(const std::vector<Tensor>& grads) {
  double sq = 0.0;
  for (const Tensor& g : grads) {
    for (std::int64_t k = 0; k < g.size(); ++k) sq += g[k] * g[k];
  }
  return std::sqrt(sq);
}

void clip_grad_norm(std::vector<Tensor>& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (Tensor& g : grads) {
    for (std::int64_t k = 0; k < g.size(); ++k) g[k] *= scale;
  }
}

}  // namespace chronoskill
