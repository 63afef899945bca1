#pragma once

#include <cstddef>
#include <random>

#include "gsaudio/core/tape.hpp"
#include "gsaudio/core/tensor.hpp"

namespace gsaudio::core {

/// Affine layer y = x W + b with W stored (in x out) and b (1 x out).
struct Linear {
  Tensor weight;
  Tensor bias;

  std::size_t in() const noexcept { return weight.rows(); }
  std::size_t out() const noexcept { return weight.cols(); }

  static Linear zeros(std::size_t in, std::size_t out);
  /// U(-1/sqrt(in), 1/sqrt(in)) for weight and bias.
  static Linear uniform(std::size_t in, std::size_t out, std::mt19937_64& rng);
};

Var apply(const Linear& layer, Var x, ParamBinder& binder);

/// Plain forward pass on values (no tape).
Tensor apply(const Linear& layer, const Tensor& x);

}  // namespace gsaudio::core
