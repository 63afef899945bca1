#pragma once

#include <functional>
#include <span>

#include "gsaudio/core/tensor.hpp"

namespace gsaudio::core {

/// Scalar function of a tensor. When `gradient` is non-null the function
/// also writes its analytic gradient (same shape as the argument) there.
using ScalarFunction = std::function<double(const Tensor& x, Tensor* gradient)>;

/// max over checked coordinates of
///   |analytic - central| / max(|analytic|, |central|, 1e-12)
/// where central = (f(x + h e_i) - f(x - h e_i)) / 2h. `coordinates` empty
/// means every coordinate. Throws NumericError on a non-finite value.
double finite_difference_check(const ScalarFunction& f, const Tensor& point, double step,
                               std::span<const std::size_t> coordinates = {});

}  // namespace gsaudio::core
