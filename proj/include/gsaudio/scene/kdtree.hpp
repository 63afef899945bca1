#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::scene {

struct Neighbor {
  double distance_sq = 0.0;
  std::size_t index = 0;

  friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

/// Static 3-d tree over a copy of the points. Queries are exact and order
/// results by (squared distance, index), so ties resolve to the lower index
/// exactly as a sorted brute-force scan would.
class KdTree {
 public:
  /// `xyz` holds 3 coordinates per point.
  explicit KdTree(std::span<const double> xyz, std::size_t leaf_size = 12);

  std::size_t size() const noexcept { return points_.size() / 3; }

  /// The min(k, size()) nearest points to `query`, nearest first.
  std::vector<Neighbor> nearest(const Vec3& query, std::size_t k) const;

  /// Number of points with squared distance strictly below `radius_sq`.
  std::size_t count_within(const Vec3& query, double radius_sq) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range into order_
    int axis = -1;                   // -1 for leaves
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  Vec3 point(std::size_t i) const { return {points_[3 * i], points_[3 * i + 1], points_[3 * i + 2]}; }

  std::vector<double> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

/// Sorted brute-force scan through the SIMD distance kernel.
std::vector<Neighbor> nearest_brute_force(std::span<const double> xyz, const Vec3& query, std::size_t k);

}  // namespace gsaudio::scene
