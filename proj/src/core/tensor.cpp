#include "gsaudio/core/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "gsaudio/error.hpp"

namespace gsaudio::core {

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw ContractViolation("tensor shape must have at least one dimension");
  std::size_t count = 1;
  for (std::size_t d : shape_) {
    if (d == 0) throw ContractViolation("tensor dimensions must be positive");
    count *= d;
  }
  if (count != data_.size())
    throw ContractViolation("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape product " + std::to_string(count));
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) { return filled(rows, cols, 0.0); }

Tensor Tensor::filled(std::size_t rows, std::size_t cols, double value) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1, 1}, {value}); }

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n, 1}, std::move(values));
}

std::size_t Tensor::rows() const noexcept {
  if (shape_.size() < 2) return shape_.empty() ? 0 : 1;
  return shape_[0];
}

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 0;
  if (shape_.size() == 1) return shape_[0];
  return std::accumulate(shape_.begin() + 1, shape_.end(), std::size_t{1}, std::multiplies<>());
}

double Tensor::item() const {
  if (data_.size() != 1) throw ContractViolation("item() requires a single-element tensor");
  return data_[0];
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::fill(double value) noexcept {
  for (double& v : data_) v = value;
}

Tensor Tensor::transposed() const {
  const std::size_t r = rows(), c = cols();
  Tensor out = zeros(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.data_[j * r + i] = data_[i * c + j];
  return out;
}

Tensor Tensor::select_rows(std::span<const std::size_t> indices) const {
  const std::size_t c = cols();
  if (indices.empty()) throw ContractViolation("select_rows: empty index list");
  std::vector<double> out;
  out.reserve(indices.size() * c);
  for (std::size_t idx : indices) {
    if (idx >= rows()) throw ContractViolation("select_rows: index out of range");
    out.insert(out.end(), data_.begin() + idx * c, data_.begin() + (idx + 1) * c);
  }
  return Tensor({indices.size(), c}, std::move(out));
}

void Tensor::append_rows(const Tensor& more) {
  if (more.empty()) return;
  if (empty()) {
    *this = more;
    return;
  }
  if (more.cols() != cols()) throw ContractViolation("append_rows: column count mismatch");
  const std::size_t c = cols();
  data_.insert(data_.end(), more.data_.begin(), more.data_.end());
  shape_ = {data_.size() / c, c};
}

}  // namespace gsaudio::core
