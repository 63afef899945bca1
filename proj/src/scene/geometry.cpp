#include "gsaudio/scene/geometry.hpp"

#include <cmath>

#include "gsaudio/error.hpp"

namespace gsaudio::scene {
namespace {

template <std::size_t R, std::size_t K, std::size_t C>
std::array<std::array<double, C>, R> mul(const std::array<std::array<double, K>, R>& a,
                                         const std::array<std::array<double, C>, K>& b) {
  std::array<std::array<double, C>, R> out{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t k = 0; k < K; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

template <std::size_t R, std::size_t C>
std::array<std::array<double, R>, C> transpose(const std::array<std::array<double, C>, R>& a) {
  std::array<std::array<double, R>, C> out{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) out[j][i] = a[i][j];
  return out;
}

template <typename M>
bool finite(const M& m) {
  for (const auto& row : m)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Pose Pose::from_yaw(const Vec3& position, double yaw) {
  return Pose{position, {std::cos(yaw), std::sin(yaw), 0.0}, yaw};
}

void validate(const Pose& pose) {
  for (double v : pose.position)
    if (!std::isfinite(v)) throw ContractViolation("pose position is not finite");
  if (std::fabs(norm(pose.direction) - 1.0) > 1e-9) throw ContractViolation("pose direction is not a unit vector");
}

Mat3 rotation_from_quaternion(const std::array<double, 4>& q) {
  const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  if (!(n > 0.0) || !std::isfinite(n)) throw ContractViolation("quaternion must be finite and non-zero");
  const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Mat3 covariance_from(const std::array<double, 4>& quaternion, const Vec3& scale) {
  Mat3 rs = rotation_from_quaternion(quaternion);
  for (auto& row : rs)
    for (std::size_t j = 0; j < 3; ++j) row[j] *= scale[j];
  return mul(rs, transpose(rs));
}

Mat2 project_covariance(const Mat3& sigma, const ProjectionInputs& inputs) {
  if (!finite(sigma) || !finite(inputs.view) || !finite(inputs.jacobian))
    throw ContractViolation("project_covariance: non-finite input");
  const Mat2x3 jw = mul(inputs.jacobian, inputs.view);
  Mat2 out = mul(mul(jw, sigma), transpose(jw));
  const double off = 0.5 * (out[0][1] + out[1][0]);
  out[0][1] = out[1][0] = off;
  return out;
}

}  // namespace gsaudio::scene
