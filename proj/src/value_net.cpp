#include "chronoskill/value_net.hpp"

#include "chronoskill/error.hpp"

namespace chronoskill {

ValueNet ValueNet::build(Variant variant, int obs_dim, int horizon,
                         const std::vector<int>& widths, std::uint64_t seed) {
  if (obs_dim < 1 || horizon < 1 || widths.empty()) {
    throw std::invalid_argument("value net: invalid dimensions");
  }
  ValueNet net(variant, obs_dim, horizon);
  Rng rng(seed);
  int in_dim = net.input_dim();
  for (int width : widths) {
    net.hidden.push_back(init_linear(in_dim, width, rng));
    in_dim = width;
  }
  net.out = init_linear(in_dim, 1, rng);
  return net;
}

std::vector<double> ValueNet::input(std::span<const double> obs, int t) const {
  if (static_cast<int>(obs.size()) != obs_dim_) {
    throw DimensionError("value net: observation length " + std::to_string(obs.size()) +
                         " vs obs_dim " + std::to_string(obs_dim_));
  }
  if (t < 0 || t >= horizon_) {
    throw std::invalid_argument("value net: step " + std::to_string(t) + " outside [0," +
                                std::to_string(horizon_) + ")");
  }
  std::vector<double> in(obs.begin(), obs.end());
  if (variant_ != Variant::vanilla) {
    in.push_back(static_cast<double>(t) / static_cast<double>(horizon_));
  }
  return in;
}

double ValueNet::forward(std::span<const double> obs, int t) const {
  const std::vector<double> h = mlp_hidden(hidden, input(obs, t));
  double v = 0.0;
  linear_apply(out, h, std::span<double>(&v, 1));
  return v;
}

std::vector<Tensor*> ValueNet::params() {
  std::vector<Tensor*> p;
  for (Linear& layer : hidden) {
    p.push_back(&layer.w);
    p.push_back(&layer.b);
  }
  p.push_back(&out.w);
  p.push_back(&out.b);
  return p;
}

std::vector<const Tensor*> ValueNet::params() const {
  auto mut = const_cast<ValueNet*>(this)->params();
  return {mut.begin(), mut.end()};
}

std::vector<std::string> ValueNet::param_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    names.push_back("value.hidden." + std::to_string(l) + ".w");
    names.push_back("value.hidden." + std::to_string(l) + ".b");
  }
  names.push_back("value.out.w");
  names.push_back("value.out.b");
  return names;
}

Var ValueNet::forward_graph(Tape& tape, LeafCache& leaves, const Tensor& input_batch) const {
  const Var x = tape.input(input_batch);
  const Var h = mlp_hidden_graph(tape, leaves, hidden, 0, x);
  const int base = 2 * static_cast<int>(hidden.size());
  return tape.affine(h, leaves.leaf(base), leaves.leaf(base + 1));
}

}  // namespace chronoskill
