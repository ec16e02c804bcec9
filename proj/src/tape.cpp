#include "chronoskill/tape.hpp"

#include <cmath>
#include <numbers>

namespace chronoskill {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;   // 0.5*ln(2*pi)
constexpr double kHalfLog2PiE = 1.41893853320467274178;  // 0.5*ln(2*pi*e)

void check_affine_shapes(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.cols() != w.rows() ||
      w.cols() != b.dim(0)) {
    throw DimensionError("affine: incompatible shapes x=" + x.shape_str() +
                         " w=" + w.shape_str() + " b=" + b.shape_str());
  }
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
}

Tensor affine_value(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int rows = x.rows(), inner = x.cols(), cols = w.cols();
  Tensor out({rows, cols});
  for (int r = 0; r < rows; ++r) {
    const double* xr = x.data() + static_cast<std::size_t>(r) * inner;
    double* or_ = out.data() + static_cast<std::size_t>(r) * cols;
    for (int j = 0; j < cols; ++j) or_[j] = b[j];
    for (int i = 0; i < inner; ++i) {
      const double xi = xr[i];
      const double* wi = w.data() + static_cast<std::size_t>(i) * cols;
      for (int j = 0; j < cols; ++j) or_[j] += xi * wi[j];
    }
  }
  return out;
}

}  // namespace

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw UsageError("variable id " + std::to_string(v.id) + " is not on this tape");
  }
}

const Tape::Node& Tape::node(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

Var Tape::input(Tensor value) {
  Node n{.op = Op::kLeaf, .value = std::move(value)};
  return push(std::move(n));
}

Var Tape::param(Tensor value, int param_id) {
  Node n{.op = Op::kLeaf, .value = std::move(value), .param_id = param_id};
  return push(std::move(n));
}

Var Tape::affine(Var x, Var w, Var b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  check_affine_shapes(xv, wv, bv);
  Node n{.op = Op::kAffine, .a = x.id, .b = w.id, .value = affine_value(xv, wv, bv)};
  n.s0 = static_cast<double>(b.id);  // third operand id carried through s0
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return push(Node{.op = Op::kTanh, .a = x.id, .value = std::move(out)});
}

Var Tape::add(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape("add", av, bv);
  Tensor out = av;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return push(Node{.op = Op::kAdd, .a = a.id, .b = b.id, .value = std::move(out)});
}

Var Tape::sub(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape("sub", av, bv);
  Tensor out = av;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return push(Node{.op = Op::kSub, .a = a.id, .b = b.id, .value = std::move(out)});
}

Var Tape::mul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape("mul", av, bv);
  Tensor out = av;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return push(Node{.op = Op::kMul, .a = a.id, .b = b.id, .value = std::move(out)});
}

Var Tape::scale(Var x, double c) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= c;
  return push(Node{.op = Op::kScale, .a = x.id, .s0 = c, .value = std::move(out)});
}

Var Tape::add_scalar(Var x, double c) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += c;
  return push(Node{.op = Op::kAddScalar, .a = x.id, .s0 = c, .value = std::move(out)});
}

Var Tape::sub_const(Var x, Tensor c) {
  const Tensor& xv = value(x);
  check_same_shape("sub_const", xv, c);
  Tensor out = xv;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] -= c[i];
  return push(Node{.op = Op::kSubConst, .a = x.id, .value = std::move(out), .aux = std::move(c)});
}

Var Tape::mul_const(Var x, Tensor c) {
  const Tensor& xv = value(x);
  check_same_shape("mul_const", xv, c);
  Tensor out = xv;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= c[i];
  return push(Node{.op = Op::kMulConst, .a = x.id, .value = std::move(out), .aux = std::move(c)});
}

Var Tape::exp(Var x) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  return push(Node{.op = Op::kExp, .a = x.id, .value = std::move(out)});
}

Var Tape::square(Var x) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= out[i];
  return push(Node{.op = Op::kSquare, .a = x.id, .value = std::move(out)});
}

Var Tape::clamp(Var x, double lo, double hi) {
  Tensor out = value(x);
  for (std::int64_t i = 0; i < out.size(); ++i) {
    out[i] = out[i] < lo ? lo : (out[i] > hi ? hi : out[i]);
  }
  return push(Node{.op = Op::kClamp, .a = x.id, .s0 = lo, .s1 = hi, .value = std::move(out)});
}

Var Tape::min(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape("min", av, bv);
  Tensor out = av;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] < bv[i] ? av[i] : bv[i];
  return push(Node{.op = Op::kMin, .a = a.id, .b = b.id, .value = std::move(out)});
}

Var Tape::sum(Var x) {
  const Tensor& xv = value(x);
  double total = 0.0;
  for (std::int64_t i = 0; i < xv.size(); ++i) total += xv[i];
  return push(Node{.op = Op::kSum, .a = x.id, .value = Tensor::scalar(total)});
}

Var Tape::gauss_logprob(Var mean, Var logstd, Tensor actions) {
  const Tensor& mv = value(mean);
  const Tensor& sv = value(logstd);
  if (mv.rank() != 2 || sv.rank() != 1 || mv.cols() != sv.dim(0) || !actions.same_shape(mv)) {
    throw DimensionError("gauss_logprob: incompatible shapes mean=" + mv.shape_str() +
                         " logstd=" + sv.shape_str() + " actions=" + actions.shape_str());
  }
  const int m = mv.rows(), d = mv.cols();
  Tensor out({m});
  for (int r = 0; r < m; ++r) {
    double lp = 0.0;
    for (int j = 0; j < d; ++j) {
      const double z = (actions.at(r, j) - mv.at(r, j)) * std::exp(-sv[j]);
      lp += -0.5 * z * z - sv[j] - kHalfLog2Pi;
    }
    out[r] = lp;
  }
  return push(Node{.op = Op::kGaussLogProb,
                   .a = mean.id,
                   .b = logstd.id,
                   .value = std::move(out),
                   .aux = std::move(actions)});
}

Gradients Tape::backward(Var loss) const {
  check(loss);
  const Node& loss_node = nodes_[static_cast<std::size_t>(loss.id)];
  if (loss_node.value.size() != 1) {
    throw UsageError("backward requires a scalar loss, got shape " + loss_node.value.shape_str());
  }

  std::vector<Tensor> grad(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) grad[i] = Tensor::zeros_like(nodes_[i].value);
  grad[static_cast<std::size_t>(loss.id)][0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const Tensor& g = grad[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAffine: {
        const int b_id = static_cast<int>(n.s0);
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& w = nodes_[static_cast<std::size_t>(n.b)].value;
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        Tensor& gw = grad[static_cast<std::size_t>(n.b)];
        Tensor& gb = grad[static_cast<std::size_t>(b_id)];
        const int rows = x.rows(), inner = x.cols(), cols = w.cols();
        for (int r = 0; r < rows; ++r) {
          const double* gr = g.data() + static_cast<std::size_t>(r) * cols;
          const double* xr = x.data() + static_cast<std::size_t>(r) * inner;
          double* gxr = gx.data() + static_cast<std::size_t>(r) * inner;
          for (int i = 0; i < inner; ++i) {
            const double* wi = w.data() + static_cast<std::size_t>(i) * cols;
            double* gwi = gw.data() + static_cast<std::size_t>(i) * cols;
            double acc = 0.0;
            const double xi = xr[i];
            for (int j = 0; j < cols; ++j) {
              acc += gr[j] * wi[j];
              gwi[j] += xi * gr[j];
            }
            gxr[i] += acc;
          }
          for (int j = 0; j < cols; ++j) gb[j] += gr[j];
        }
        break;
      }
      case Op::kTanh: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
        break;
      }
      case Op::kAdd: {
        Tensor& ga = grad[static_cast<std::size_t>(n.a)];
        Tensor& gb = grad[static_cast<std::size_t>(n.b)];
        for (std::int64_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        Tensor& ga = grad[static_cast<std::size_t>(n.a)];
        Tensor& gb = grad[static_cast<std::size_t>(n.b)];
        for (std::int64_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] -= g[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& av = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& bv = nodes_[static_cast<std::size_t>(n.b)].value;
        Tensor& ga = grad[static_cast<std::size_t>(n.a)];
        Tensor& gb = grad[static_cast<std::size_t>(n.b)];
        for (std::int64_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * bv[i];
          gb[i] += g[i] * av[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i] * n.s0;
        break;
      }
      case Op::kAddScalar:
      case Op::kSubConst: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        break;
      }
      case Op::kMulConst: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i] * n.aux[i];
        break;
      }
      case Op::kExp: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i] * n.value[i];
        break;
      }
      case Op::kSquare: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) gx[i] += g[i] * 2.0 * x[i];
        break;
      }
      case Op::kClamp: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        for (std::int64_t i = 0; i < g.size(); ++i) {
          if (x[i] > n.s0 && x[i] < n.s1) gx[i] += g[i];
        }
        break;
      }
      case Op::kMin: {
        const Tensor& av = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& bv = nodes_[static_cast<std::size_t>(n.b)].value;
        Tensor& ga = grad[static_cast<std::size_t>(n.a)];
        Tensor& gb = grad[static_cast<std::size_t>(n.b)];
        for (std::int64_t i = 0; i < g.size(); ++i) {
          if (av[i] < bv[i]) {
            ga[i] += g[i];
          } else {
            gb[i] += g[i];
          }
        }
        break;
      }
      case Op::kSum: {
        Tensor& gx = grad[static_cast<std::size_t>(n.a)];
        const double gs = g[0];
        for (std::int64_t i = 0; i < gx.size(); ++i) gx[i] += gs;
        break;
      }
      case Op::kGaussLogProb: {
        const Tensor& mv = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& sv = nodes_[static_cast<std::size_t>(n.b)].value;
        Tensor& gm = grad[static_cast<std::size_t>(n.a)];
        Tensor& gs = grad[static_cast<std::size_t>(n.b)];
        const int m = mv.rows(), d = mv.cols();
        for (int r = 0; r < m; ++r) {
          const double gr = g[r];
          if (gr == 0.0) continue;
          for (int j = 0; j < d; ++j) {
            const double inv_sigma = std::exp(-sv[j]);
            const double z = (n.aux.at(r, j) - mv.at(r, j)) * inv_sigma;
            gm.at(r, j) += gr * z * inv_sigma;
            gs[j] += gr * (z * z - 1.0);
          }
        }
        break;
      }
    }
  }

  Gradients out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::kLeaf && n.param_id >= 0) {
      auto [it, inserted] = out.by_param.try_emplace(n.param_id, grad[i]);
      if (!inserted) {
        Tensor& acc = it->second;
        for (std::int64_t k = 0; k < acc.size(); ++k) acc[k] += grad[i][k];
      }
    }
  }
  return out;
}

Var gaussian_entropy(Tape& tape, Var logstd) {
  const std::int64_t d = tape.value(logstd).size();
  return tape.add_scalar(tape.sum(logstd), static_cast<double>(d) * kHalfLog2PiE);
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  check_affine_shapes(x, w, b);
  return affine_value(x, w, b);
}

Tensor tanh_activation(const Tensor& x) {
  Tensor out = x;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return out;
}

double gaussian_logprob(std::span<const double> mean, std::span<const double> logstd,
                        std::span<const double> action) {
  if (mean.size() != logstd.size() || mean.size() != action.size() || mean.empty()) {
    throw DimensionError("gaussian_logprob: lengths " + std::to_string(mean.size()) + "/" +
                         std::to_string(logstd.size()) + "/" + std::to_string(action.size()));
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-logstd[i]);
    lp += -0.5 * z * z - logstd[i] - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double> logstd) {
  double h = 0.0;
  for (double s : logstd) h += s + kHalfLog2PiE;
  return h;
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double eps) {
  if (!(eps > 0.0)) throw UsageError("finite_diff_grad: eps must be positive");
  Tensor grad = Tensor::zeros_like(x);
  Tensor probe = x;
  for (std::int64_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double fp = f(probe);
    probe[i] = x[i] - eps;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite_diff_grad: non-finite evaluation at coordinate " +
                         std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

}  // namespace chronoskill
