#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "chronoskill/tensor.hpp"

namespace chronoskill {

// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

// dLoss/dParam for every parameter leaf that appeared on the tape. Parameters
// that never reached the loss get an exact zero tensor from get_or_zero.
struct Gradients {
  std::map<int, Tensor> by_param;

  Tensor get_or_zero(int param_id, const std::vector<int>& shape) const {
    auto it = by_param.find(param_id);
    return it != by_param.end() ? it->second : Tensor(shape);
  }
};

// Reverse-mode differentiation over a flat list of recorded primitives.
// Nodes are appended in construction order, which is already a topological
// order, and each forward pass builds a fresh tape.
class Tape {
 public:
  // Non-differentiable constant (observations, actions, targets).
  Var input(Tensor value);

  // Differentiable leaf; gradients are reported under param_id. Several
  // leaves may share a param_id; their gradients are summed.
  Var param(Tensor value, int param_id);

  // out[b,j] = sum_i x[b,i] * w[i,j] + b[j]
  Var affine(Var x, Var w, Var b);

  Var tanh(Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double c);
  Var add_scalar(Var x, double c);
  Var sub_const(Var x, Tensor c);   // x - c
  Var mul_const(Var x, Tensor c);   // x ⊙ c
  Var exp(Var x);
  Var square(Var x);
  // Gradient passes only strictly inside (lo, hi); both edges clamp it to 0.
  Var clamp(Var x, double lo, double hi);
  // Elementwise min; on ties the gradient goes to b.
  Var min(Var a, Var b);
  Var sum(Var x);  // -> shape {1}

  // Row-wise diagonal-Gaussian log density, shape {m}:
  //   out[r] = sum_j -0.5*((act[r,j]-mean[r,j])/sigma_j)^2 - logstd[j] - 0.5*ln(2*pi)
  // mean is [m,d], logstd is {d} broadcast over rows, actions are constant.
  Var gauss_logprob(Var mean, Var logstd, Tensor actions);

  const Tensor& value(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  // loss must be a scalar recorded on this tape.
  Gradients backward(Var loss) const;

 private:
  enum class Op {
    kLeaf,
    kAffine,
    kTanh,
    kAdd,
    kSub,
    kMul,
    kScale,
    kAddScalar,
    kSubConst,
    kMulConst,
    kExp,
    kSquare,
    kClamp,
    kMin,
    kSum,
    kGaussLogProb,
  };

  struct Node {
    Op op;
    int a = -1, b = -1;
    double s0 = 0.0, s1 = 0.0;
    Tensor value;
    Tensor aux;  // constant operand (mul_const/sub_const tensor, gauss actions)
    int param_id = -1;
  };

  Var push(Node n);
  const Node& node(Var v) const;
  void check(Var v) const;

  std::vector<Node> nodes_;
};

// Scalar convenience: sum of per-dim entropies of a diagonal Gaussian,
// logstd_i + 0.5*ln(2*pi*e) each, built from sum + add_scalar.
Var gaussian_entropy(Tape& tape, Var logstd);

// ---- Tape-free numeric mirrors (rollout path and test oracles) ----

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor tanh_activation(const Tensor& x);
double gaussian_logprob(std::span<const double> mean, std::span<const double> logstd,
                        std::span<const double> action);
double gaussian_entropy(std::span<const double> logstd);

// Central differences (f(x+eps*e_i) - f(x-eps*e_i)) / (2*eps).
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double eps);

}  // namespace chronoskill
