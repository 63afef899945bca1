#include "gsaudio/scene/queries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsaudio/core/parallel.hpp"
#include "gsaudio/error.hpp"
#include "gsaudio/scene/kdtree.hpp"
#include "gsaudio/simd/kernels.hpp"

namespace gsaudio::scene {

std::size_t vicinity_count(std::size_t n, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0))
    throw ConfigError("vicinity percentile must lie in (0, 100], got " + std::to_string(percentile));
  // Multiply before dividing so that e.g. 15% of 100 is exactly 15.
  const double k = std::ceil(percentile * static_cast<double>(n) / 100.0 - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, std::max<std::size_t>(n, 1));
}

std::vector<std::size_t> vicinity(const AudioPointSet& points, const Vec3& center, double percentile) {
  const std::size_t n = points.size();
  const std::size_t k = vicinity_count(n, percentile);
  if (n == 0) throw ContractViolation("vicinity of an empty point set");
  const auto xyz = points.positions.data();
  const auto found = n < kBruteForceLimit ? nearest_brute_force(xyz, center, k) : KdTree(xyz).nearest(center, k);
  std::vector<std::size_t> out(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) out[i] = found[i].index;
  return out;
}

std::vector<std::size_t> neighbor_counts(const AudioPointSet& points, double radius) {
  if (!(radius > 0.0)) throw ContractViolation("neighbor radius must be positive");
  const std::size_t n = points.size();
  const double r2 = radius * radius;
  const auto xyz = points.positions.data();
  std::vector<std::size_t> counts(n, 0);
  if (n < kBruteForceLimit) {
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      simd::squared_distances(xyz, &xyz[3 * i], d2);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && d2[j] < r2) ++counts[i];
    }
    return counts;
  }
  const KdTree tree(xyz);
  core::parallel_for(n, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) counts[i] = tree.count_within(points.position(i), r2) - 1;
  });
  return counts;
}

std::vector<double> nearest_neighbor_distances(const AudioPointSet& points) {
  const std::size_t n = points.size();
  std::vector<double> out(n, std::numeric_limits<double>::infinity());
  if (n < 2) return out;
  const auto xyz = points.positions.data();
  const KdTree tree(xyz);
  core::parallel_for(n, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      // The query point itself is among the two nearest; take the other one.
      const auto nn = tree.nearest(points.position(i), 2);
      const Neighbor& other = nn[0].index == i ? nn[1] : nn[0];
      out[i] = std::sqrt(other.distance_sq);
    }
  });
  return out;
}

PruneResult prune_outliers(const AudioPointSet& points, std::size_t min_neighbors, double radius) {
  const auto counts = neighbor_counts(points, radius);
  std::vector<std::size_t> keep, removed;
  for (std::size_t i = 0; i < counts.size(); ++i) (counts[i] < min_neighbors ? removed : keep).push_back(i);
  if (keep.empty()) return {points, {}};
  return {points.subset(keep), std::move(removed)};
}

}  // namespace gsaudio::scene
