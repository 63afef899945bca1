#pragma once

// Reverse-mode automatic differentiation over matrix-shaped tensors.
//
// A Tape records primitive applications in evaluation order; backward() walks
// the record once in reverse. Elementwise binary operations broadcast an
// operand whose row or column count is 1 (row bias, per-row mask, scalar).

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "gsaudio/core/tensor.hpp"

namespace gsaudio::core {

struct ParamId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ParamId&, const ParamId&) = default;
};

class Tape;

/// Handle to a recorded value. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;
  Tape& tape() const { return *tape_; }
  std::uint32_t index() const { return index_; }
  const Tensor& value() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index) : tape_(tape), index_(index) {}
  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

enum class Op : std::uint8_t {
  leaf,
  matmul,
  add,
  sub,
  mul,
  scale,
  relu,
  sigmoid,
  square,
  abs,
  log,
  concat_cols,
  mean_rows,
  mean_all,
  sum_all,
  row_prod,
  gather_rows,
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf whose gradient is reported by backward(). Registering the same id
  /// twice returns the first handle.
  Var parameter(ParamId id, const Tensor& value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var square(Var a);
  Var abs(Var a);
  /// Elementwise log(a + offset); non-positive arguments give NaN.
  Var log(Var a, double offset = 0.0);
  Var concat_cols(std::span<const Var> parts);
  /// Column means: (m x n) -> (1 x n).
  Var mean_rows(Var a);
  Var mean(Var a);
  Var sum(Var a);
  /// Product across each row: (m x n) -> (m x 1).
  Var row_prod(Var a);
  Var gather_rows(Var a, std::vector<std::size_t> rows);

  const Tensor& value(Var v) const { return nodes_.at(v.index_).value; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradients of `output` (seeded with `seed`, same shape) with respect to
  /// every registered parameter the output depends on.
  std::map<ParamId, Tensor> backward(Var output, const Tensor& seed) const;
  /// backward() with a unit seed on a single-element output.
  std::map<ParamId, Tensor> backward(Var output) const;

 private:
  struct Node {
    Op op = Op::leaf;
    std::uint32_t lhs = 0;
    std::uint32_t rhs = 0;
    std::vector<std::uint32_t> parts;
    std::vector<std::size_t> rows;
    double factor = 0.0;
    bool has_param = false;
    ParamId param;
    bool needs_grad = false;
    Tensor value;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  Var elementwise(Op op, Var a, Var b);
  Var unary(Op op, Var a, Tensor value);

  std::vector<Node> nodes_;
  std::map<ParamId, std::uint32_t> params_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator*(double factor, Var a);
Var matmul(Var a, Var b);
Var relu(Var a);
Var sigmoid(Var a);
Var square(Var a);
Var abs(Var a);
Var log(Var a, double offset = 0.0);
Var mean_rows(Var a);
Var mean(Var a);
Var sum(Var a);
Var row_prod(Var a);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(Var a, std::vector<std::size_t> rows);

/// Dense matrix product helper used by the tape and by inference code.
/// out (+)= a * b, parallel over rows of a, routed through the SIMD kernels.
void matmul_into(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate);

/// Binds network tensors to tape leaves. Tensors registered with track()
/// become parameters; everything else is recorded as a constant.
class ParamBinder {
 public:
  explicit ParamBinder(Tape& tape) : tape_(&tape) {}
  void track(const Tensor& tensor, ParamId id) { ids_[&tensor] = id; }
  Var bind(const Tensor& tensor);
  Tape& tape() const { return *tape_; }

 private:
  Tape* tape_;
  std::unordered_map<const Tensor*, ParamId> ids_;
};

}  // namespace gsaudio::core
