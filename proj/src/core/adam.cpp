#include "gsaudio/core/adam.hpp"

#include <cmath>

#include "gsaudio/error.hpp"

namespace gsaudio::core {

void adam_step(Tensor& param, const Tensor& grad, AdamMoments& state, const AdamHyper& hyper) {
  if (!param.same_shape(grad)) throw ContractViolation("adam_step: gradient shape differs from parameter");
  if (state.first.empty()) {
    state.first = Tensor::zeros(param.rows(), param.cols());
    state.second = Tensor::zeros(param.rows(), param.cols());
  }
  if (state.first.size() != param.size() || state.second.size() != param.size())
    throw ContractViolation("adam_step: moment shape differs from parameter");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);
  auto p = param.data();
  auto g = grad.data();
  auto m = state.first.data();
  auto v = state.second.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
    v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    p[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

void append_moment_rows(AdamMoments& state, std::size_t rows, std::size_t cols) {
  if (state.first.empty() || rows == 0) return;
  state.first.append_rows(Tensor::zeros(rows, cols));
  state.second.append_rows(Tensor::zeros(rows, cols));
}

void select_moment_rows(AdamMoments& state, std::span<const std::size_t> kept) {
  if (state.first.empty()) return;
  state.first = state.first.select_rows(kept);
  state.second = state.second.select_rows(kept);
}

}  // namespace gsaudio::core
