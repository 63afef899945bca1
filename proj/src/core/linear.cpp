#include "gsaudio/core/linear.hpp"

#include <cmath>

namespace gsaudio::core {

Linear Linear::zeros(std::size_t in, std::size_t out) {
  return {Tensor::zeros(in, out), Tensor::zeros(1, out)};
}

Linear Linear::uniform(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Linear layer = zeros(in, out);
  for (double& w : layer.weight.data()) w = dist(rng);
  for (double& b : layer.bias.data()) b = dist(rng);
  return layer;
}

Var apply(const Linear& layer, Var x, ParamBinder& binder) {
  return matmul(x, binder.bind(layer.weight)) + binder.bind(layer.bias);
}

Tensor apply(const Linear& layer, const Tensor& x) {
  Tensor out;
  matmul_into(x, layer.weight, out, false);
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += layer.bias(0, c);
  return out;
}

}  // namespace gsaudio::core
