#pragma once

#include <cstddef>
#include <vector>

#include "gsaudio/scene/audio_points.hpp"
#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::scene {

inline constexpr std::size_t kBruteForceLimit = 256;
inline constexpr double kDefaultVicinityPercentile = 15.0;

/// ceil(percentile / 100 * n), at least 1. Throws ConfigError unless the
/// percentile lies in (0, 100].
std::size_t vicinity_count(std::size_t n, double percentile);

/// Indices of the vicinity_count() nearest points, nearest first, ties to
/// the lower index. Uses a k-d tree from kBruteForceLimit points upward.
std::vector<std::size_t> vicinity(const AudioPointSet& points, const Vec3& center,
                                  double percentile = kDefaultVicinityPercentile);

/// Number of other points strictly within `radius` of each point.
std::vector<std::size_t> neighbor_counts(const AudioPointSet& points, double radius);

/// Distance from each point to its nearest other point (0 when coincident,
/// +inf for a single point).
std::vector<double> nearest_neighbor_distances(const AudioPointSet& points);

struct PruneResult {
  AudioPointSet retained;
  std::vector<std::size_t> removed;  // ascending original indices
};

/// Removes points with fewer than `min_neighbors` other points within
/// `radius`. If every point would go, nothing is removed and `removed` is
/// empty. Throws ContractViolation unless radius > 0.
PruneResult prune_outliers(const AudioPointSet& points, std::size_t min_neighbors, double radius);

}  // namespace gsaudio::scene
