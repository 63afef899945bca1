#pragma once

#include <array>
#include <optional>

namespace gsaudio::scene {

/// 3-vector; a distinct type so the arithmetic below is found by lookup.
struct Vec3 : std::array<double, 3> {};
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat2x3 = std::array<std::array<double, 3>, 2>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a);
/// Same summation order as the SIMD squared-distance kernel.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return (dx * dx + dy * dy) + dz * dz;
}

/// Listener or source pose: position and unit viewing direction.
struct Pose {
  Vec3 position{};
  Vec3 direction{1.0, 0.0, 0.0};
  std::optional<double> yaw;

  /// Horizontal pose facing (cos yaw, sin yaw, 0).
  static Pose from_yaw(const Vec3& position, double yaw);
};

/// Throws ContractViolation unless finite with a unit direction (1e-9).
void validate(const Pose& pose);

/// Rotation matrix of a quaternion (w, x, y, z); normalizes first.
Mat3 rotation_from_quaternion(const std::array<double, 4>& q);

/// Sigma = R S S^T R^T with S = diag(scale).
Mat3 covariance_from(const std::array<double, 4>& quaternion, const Vec3& scale);

struct ProjectionInputs {
  Mat3 view{};      // W
  Mat2x3 jacobian{};  // J
};

/// Sigma' = J W Sigma W^T J^T, symmetrized.
Mat2 project_covariance(const Mat3& sigma, const ProjectionInputs& inputs);

}  // namespace gsaudio::scene
