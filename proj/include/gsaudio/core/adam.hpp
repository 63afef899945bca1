#pragma once

#include <cstdint>
#include <span>

#include "gsaudio/core/tensor.hpp"

namespace gsaudio::core {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter optimizer state. Empty moments are lazily zero-initialized
/// to the parameter's shape on the first step.
struct AdamMoments {
  Tensor first;
  Tensor second;
  std::uint64_t step = 0;
};

/// One bias-corrected adaptive-moment update of `param` in place.
void adam_step(Tensor& param, const Tensor& grad, AdamMoments& state, const AdamHyper& hyper);

/// Keeps the moment rows of `state` that survive a row filter of the
/// parameter (densification appends zero rows, pruning drops rows).
void append_moment_rows(AdamMoments& state, std::size_t rows, std::size_t cols);
void select_moment_rows(AdamMoments& state, std::span<const std::size_t> kept);

}  // namespace gsaudio::core
