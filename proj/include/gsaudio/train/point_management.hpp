#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gsaudio/core/tensor.hpp"
#include "gsaudio/scene/audio_points.hpp"

namespace gsaudio::train {

/// Spread used for a new point when its parent has no usable neighbor
/// distance (a lone point, or one coincident with another).
inline constexpr double kFallbackSpread = 0.05;

/// Half-width of the uniform range new alpha entries are drawn from.
inline constexpr double kNewAlphaRange = 0.01;

/// Per-point running sum of alpha-gradient row norms and the number of steps
/// that touched the point since the last densification.
class GradStats {
 public:
  GradStats() = default;
  explicit GradStats(std::size_t points) : sum_(points, 0.0), count_(points, 0) {}

  std::size_t size() const noexcept { return sum_.size(); }
  /// Adds |grad row i| for every i in `rows`. `gradient` is (N x D).
  void accumulate(const core::Tensor& gradient, std::span<const std::size_t> rows);
  /// Directly records one magnitude (used by tests and by accumulate()).
  void record(std::size_t point, double magnitude);
  /// Theta_g = sum / count, 0 for untouched points.
  double theta(std::size_t point) const;

  void reset();
  void append(std::size_t points);
  void select(std::span<const std::size_t> kept);

  const std::vector<double>& sums() const noexcept { return sum_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return count_; }
  static GradStats from(std::vector<double> sums, std::vector<std::uint64_t> counts);

 private:
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
};

/// Ascending indices with Theta_g > threshold.
std::vector<std::size_t> significant_points(const GradStats& stats, double threshold);

struct DensifyResult {
  scene::AudioPointSet points;
  std::vector<std::size_t> significant;
  std::size_t added = 0;
};

/// One new point per significant point, drawn from an isotropic normal
/// centred on it with its nearest-neighbor distance as the deviation. New
/// alpha entries are uniform in [-0.01, 0.01]. Resets `stats` and extends it
/// to the new point count. Throws ContractViolation when stats and points
/// disagree in size.
DensifyResult densify(const scene::AudioPointSet& points, GradStats& stats, double threshold, std::mt19937_64& rng);

}  // namespace gsaudio::train
