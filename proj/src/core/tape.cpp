#include "gsaudio/core/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsaudio/core/parallel.hpp"
#include "gsaudio/error.hpp"
#include "gsaudio/simd/kernels.hpp"

namespace gsaudio::core {
namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

std::size_t broadcast_dim(std::size_t a, std::size_t b, const char* what) {
  if (a == b || b == 1) return a;
  if (a == 1) return b;
  throw ContractViolation(std::string(what) + ": incompatible broadcast dimensions " +
                          std::to_string(a) + " and " + std::to_string(b));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Adds f(r, c) over the broadcast output grid into `target`, folding rows or
// columns where the target has extent 1.
template <typename F>
void reduce_into(Tensor& target, std::size_t out_rows, std::size_t out_cols, F&& f) {
  const std::size_t tr = target.rows(), tc = target.cols();
  if (tr == out_rows && tc == out_cols) {
    for (std::size_t r = 0; r < out_rows; ++r)
      for (std::size_t c = 0; c < out_cols; ++c) target(r, c) += f(r, c);
    return;
  }
  for (std::size_t r = 0; r < out_rows; ++r) {
    const std::size_t rr = tr == 1 ? 0 : r;
    for (std::size_t c = 0; c < out_cols; ++c) target(rr, tc == 1 ? 0 : c) += f(r, c);
  }
}

inline double at_broadcast(const Tensor& t, std::size_t r, std::size_t c) {
  return t(t.rows() == 1 ? 0 : r, t.cols() == 1 ? 0 : c);
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(*this); }

void matmul_into(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k)
    throw ContractViolation("matmul: inner dimensions differ (" + shape_str(a) + " * " +
                            shape_str(b) + ")");
  if (out.rows() != m || out.cols() != n) out = Tensor::zeros(m, n);
  else if (!accumulate) out.fill(0.0);
  const auto& kernels = simd::active();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = out.data().data();
  const std::size_t work_per_row = std::max<std::size_t>(1, k * n);
  const std::size_t min_rows = std::max<std::size_t>(8, 65536 / work_per_row);
  parallel_for(m, min_rows, [&](std::size_t begin, std::size_t end) {
    kernels.gemm_accumulate(end - begin, n, k, pa + begin * k, pb, pc + begin * n);
  });
}

Var Tape::push(Node node) {
  if (!node.value.all_finite())
    throw NumericError("non-finite value produced by autodiff operation " +
                       std::to_string(static_cast<int>(node.op)));
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

const Tape::Node& Tape::node(Var v) const {
  if (v.tape_ != this || v.index_ >= nodes_.size())
    throw ContractViolation("variable does not belong to this tape");
  return nodes_[v.index_];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(ParamId id, const Tensor& value) {
  if (auto it = params_.find(id); it != params_.end()) return Var(this, it->second);
  Node n;
  n.value = value;
  n.has_param = true;
  n.param = id;
  n.needs_grad = true;
  Var v = push(std::move(n));
  params_[id] = v.index_;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  Node n;
  n.op = Op::matmul;
  n.lhs = a.index_;
  n.rhs = b.index_;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  matmul_into(na.value, nb.value, n.value, false);
  return push(std::move(n));
}

Var Tape::elementwise(Op op, Var a, Var b) {
  const Tensor& va = node(a).value;
  const Tensor& vb = node(b).value;
  const char* name = op == Op::add ? "add" : op == Op::sub ? "sub" : "mul";
  const std::size_t rows = broadcast_dim(va.rows(), vb.rows(), name);
  const std::size_t cols = broadcast_dim(va.cols(), vb.cols(), name);
  Tensor out = Tensor::zeros(rows, cols);
  if (va.rows() == rows && va.cols() == cols && vb.rows() == rows && vb.cols() == cols) {
    auto pa = va.data();
    auto pb = vb.data();
    auto po = out.data();
    if (op == Op::add)
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] + pb[i];
    else if (op == Op::sub)
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] - pb[i];
    else
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] * pb[i];
  } else {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const double x = at_broadcast(va, r, c), y = at_broadcast(vb, r, c);
        out(r, c) = op == Op::add ? x + y : op == Op::sub ? x - y : x * y;
      }
  }
  Node n;
  n.op = op;
  n.lhs = a.index_;
  n.rhs = b.index_;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) { return elementwise(Op::add, a, b); }
Var Tape::sub(Var a, Var b) { return elementwise(Op::sub, a, b); }
Var Tape::mul(Var a, Var b) { return elementwise(Op::mul, a, b); }

Var Tape::unary(Op op, Var a, Tensor value) {
  Node n;
  n.op = op;
  n.lhs = a.index_;
  n.needs_grad = node(a).needs_grad;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v *= factor;
  Node n;
  n.op = Op::scale;
  n.lhs = a.index_;
  n.factor = factor;
  n.needs_grad = node(a).needs_grad;
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return unary(Op::relu, a, std::move(out));
}

Var Tape::sigmoid(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = stable_sigmoid(v);
  return unary(Op::sigmoid, a, std::move(out));
}

Var Tape::square(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = v * v;
  return unary(Op::square, a, std::move(out));
}

Var Tape::abs(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = std::fabs(v);
  return unary(Op::abs, a, std::move(out));
}

Var Tape::log(Var a, double offset) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = v + offset > 0.0 ? std::log(v + offset) : std::numeric_limits<double>::quiet_NaN();
  Var v = unary(Op::log, a, std::move(out));
  nodes_[v.index_].factor = offset;
  return v;
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractViolation("concat_cols: no operands");
  const std::size_t rows = node(parts[0]).value.rows();
  std::size_t cols = 0;
  bool needs = false;
  for (Var p : parts) {
    const Node& np = node(p);
    if (np.value.rows() != rows) throw ContractViolation("concat_cols: row counts differ");
    cols += np.value.cols();
    needs = needs || np.needs_grad;
  }
  Tensor out = Tensor::zeros(rows, cols);
  std::size_t offset = 0;
  Node n;
  n.op = Op::concat_cols;
  for (Var p : parts) {
    const Tensor& v = node(p).value;
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(v.row_span(r).begin(), v.row_span(r).end(), out.row_span(r).begin() + offset);
    offset += v.cols();
    n.parts.push_back(p.index_);
  }
  n.needs_grad = needs;
  n.value = std::move(out);
  return push(std::move(n));
}

Var Tape::mean_rows(Var a) {
  const Tensor& v = node(a).value;
  Tensor out = Tensor::zeros(1, v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) out(0, c) += v(r, c);
  for (double& x : out.data()) x /= static_cast<double>(v.rows());
  return unary(Op::mean_rows, a, std::move(out));
}

Var Tape::mean(Var a) {
  const Tensor& v = node(a).value;
  double acc = 0.0;
  for (double x : v.data()) acc += x;
  return unary(Op::mean_all, a, Tensor::scalar(acc / static_cast<double>(v.size())));
}

Var Tape::sum(Var a) {
  double acc = 0.0;
  for (double x : node(a).value.data()) acc += x;
  return unary(Op::sum_all, a, Tensor::scalar(acc));
}

Var Tape::row_prod(Var a) {
  const Tensor& v = node(a).value;
  Tensor out = Tensor::zeros(v.rows(), 1);
  for (std::size_t r = 0; r < v.rows(); ++r) {
    double p = 1.0;
    for (double x : v.row_span(r)) p *= x;
    out(r, 0) = p;
  }
  return unary(Op::row_prod, a, std::move(out));
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> rows) {
  Tensor out = node(a).value.select_rows(rows);
  Node n;
  n.op = Op::gather_rows;
  n.lhs = a.index_;
  n.rows = std::move(rows);
  n.needs_grad = node(a).needs_grad;
  n.value = std::move(out);
  return push(std::move(n));
}

std::map<ParamId, Tensor> Tape::backward(Var output) const {
  return backward(output, Tensor::filled(node(output).value.rows(), node(output).value.cols(), 1.0));
}

std::map<ParamId, Tensor> Tape::backward(Var output, const Tensor& seed) const {
  const Node& out_node = node(output);
  if (seed.rows() != out_node.value.rows() || seed.cols() != out_node.value.cols())
    throw ContractViolation("backward: seed shape " + shape_str(seed) +
                            " does not match output shape " + shape_str(out_node.value));

  std::vector<Tensor> grads(output.index_ + 1);
  auto grad_of = [&](std::uint32_t i) -> Tensor& {
    if (grads[i].empty()) grads[i] = Tensor::zeros(nodes_[i].value.rows(), nodes_[i].value.cols());
    return grads[i];
  };
  grads[output.index_] = Tensor::zeros(seed.rows(), seed.cols());
  std::copy(seed.data().begin(), seed.data().end(), grads[output.index_].data().begin());

  for (std::uint32_t idx = output.index_ + 1; idx-- > 0;) {
    const Node& n = nodes_[idx];
    if (!n.needs_grad || n.op == Op::leaf || grads[idx].empty()) continue;
    const Tensor& g = grads[idx];
    const Node& a = nodes_[n.lhs];
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::matmul: {
        const Node& b = nodes_[n.rhs];
        if (a.needs_grad) matmul_into(g, b.value.transposed(), grad_of(n.lhs), true);
        if (b.needs_grad) matmul_into(a.value.transposed(), g, grad_of(n.rhs), true);
        break;
      }
      case Op::add:
      case Op::sub:
      case Op::mul: {
        const Node& b = nodes_[n.rhs];
        const std::size_t R = g.rows(), C = g.cols();
        if (a.needs_grad) {
          if (n.op == Op::mul)
            reduce_into(grad_of(n.lhs), R, C,
                        [&](std::size_t r, std::size_t c) { return g(r, c) * at_broadcast(b.value, r, c); });
          else
            reduce_into(grad_of(n.lhs), R, C, [&](std::size_t r, std::size_t c) { return g(r, c); });
        }
        if (b.needs_grad) {
          if (n.op == Op::mul)
            reduce_into(grad_of(n.rhs), R, C,
                        [&](std::size_t r, std::size_t c) { return g(r, c) * at_broadcast(a.value, r, c); });
          else if (n.op == Op::sub)
            reduce_into(grad_of(n.rhs), R, C, [&](std::size_t r, std::size_t c) { return -g(r, c); });
          else
            reduce_into(grad_of(n.rhs), R, C, [&](std::size_t r, std::size_t c) { return g(r, c); });
        }
        break;
      }
      case Op::scale: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.factor * g[i];
        break;
      }
      case Op::relu: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a.value[i] > 0.0) ga[i] += g[i];
        break;
      }
      case Op::sigmoid: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double s = n.value[i];
          ga[i] += g[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::square: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += 2.0 * a.value[i] * g[i];
        break;
      }
      case Op::abs: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double x = a.value[i];
          ga[i] += x > 0.0 ? g[i] : x < 0.0 ? -g[i] : 0.0;
        }
        break;
      }
      case Op::log: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / (a.value[i] + n.factor);
        break;
      }
      case Op::concat_cols: {
        std::size_t offset = 0;
        for (std::uint32_t part : n.parts) {
          const std::size_t pc = nodes_[part].value.cols();
          if (nodes_[part].needs_grad) {
            Tensor& gp = grad_of(part);
            for (std::size_t r = 0; r < g.rows(); ++r)
              for (std::size_t c = 0; c < pc; ++c) gp(r, c) += g(r, offset + c);
          }
          offset += pc;
        }
        break;
      }
      case Op::mean_rows: {
        Tensor& ga = grad_of(n.lhs);
        const double inv = 1.0 / static_cast<double>(ga.rows());
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(0, c) * inv;
        break;
      }
      case Op::mean_all: {
        Tensor& ga = grad_of(n.lhs);
        const double share = g[0] / static_cast<double>(ga.size());
        for (double& x : ga.data()) x += share;
        break;
      }
      case Op::sum_all: {
        Tensor& ga = grad_of(n.lhs);
        for (double& x : ga.data()) x += g[0];
        break;
      }
      case Op::row_prod: {
        Tensor& ga = grad_of(n.lhs);
        const std::size_t C = a.value.cols();
        std::vector<double> prefix(C + 1), suffix(C + 1);
        for (std::size_t r = 0; r < a.value.rows(); ++r) {
          auto row = a.value.row_span(r);
          prefix[0] = 1.0;
          for (std::size_t c = 0; c < C; ++c) prefix[c + 1] = prefix[c] * row[c];
          suffix[C] = 1.0;
          for (std::size_t c = C; c-- > 0;) suffix[c] = suffix[c + 1] * row[c];
          for (std::size_t c = 0; c < C; ++c) ga(r, c) += g(r, 0) * prefix[c] * suffix[c + 1];
        }
        break;
      }
      case Op::gather_rows: {
        Tensor& ga = grad_of(n.lhs);
        for (std::size_t i = 0; i < n.rows.size(); ++i) {
          auto src = g.row_span(i);
          auto dst = ga.row_span(n.rows[i]);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        break;
      }
    }
  }

  std::map<ParamId, Tensor> result;
  for (const auto& [id, index] : params_) {
    if (index <= output.index_ && !grads[index].empty())
      result.emplace(id, std::move(grads[index]));
    else
      result.emplace(id, Tensor::zeros(nodes_[index].value.rows(), nodes_[index].value.cols()));
  }
  return result;
}

Var operator+(Var a, Var b) { return a.tape().add(a, b); }
Var operator-(Var a, Var b) { return a.tape().sub(a, b); }
Var operator*(Var a, Var b) { return a.tape().mul(a, b); }
Var operator*(double factor, Var a) { return a.tape().scale(a, factor); }
Var matmul(Var a, Var b) { return a.tape().matmul(a, b); }
Var relu(Var a) { return a.tape().relu(a); }
Var sigmoid(Var a) { return a.tape().sigmoid(a); }
Var square(Var a) { return a.tape().square(a); }
Var abs(Var a) { return a.tape().abs(a); }
Var log(Var a, double offset) { return a.tape().log(a, offset); }
Var mean_rows(Var a) { return a.tape().mean_rows(a); }
Var mean(Var a) { return a.tape().mean(a); }
Var sum(Var a) { return a.tape().sum(a); }
Var row_prod(Var a) { return a.tape().row_prod(a); }
Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractViolation("concat_cols: no operands");
  return parts[0].tape().concat_cols(parts);
}
Var gather_rows(Var a, std::vector<std::size_t> rows) {
  return a.tape().gather_rows(a, std::move(rows));
}

Var ParamBinder::bind(const Tensor& tensor) {
  if (auto it = ids_.find(&tensor); it != ids_.end()) return tape_->parameter(it->second, tensor);
  return tape_->constant(tensor);
}

}  // namespace gsaudio::core
