#include "gsaudio/scene/kdtree.hpp"

#include <algorithm>
#include <queue>

#include "gsaudio/error.hpp"
#include "gsaudio/simd/kernels.hpp"

namespace gsaudio::scene {

KdTree::KdTree(std::span<const double> xyz, std::size_t leaf_size)
    : points_(xyz.begin(), xyz.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (xyz.size() % 3 != 0) throw ContractViolation("KdTree expects 3 coordinates per point");
  order_.resize(size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!order_.empty()) build(0, order_.size());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = point(order_[begin]), hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    const Vec3 p = point(order_[i]);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as one leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double pa = points_[3 * a + axis], pb = points_[3 * b + axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[3 * order_[mid] + axis];
  // Left holds [begin, mid) with coordinates <= split, right [mid, end) with >= split.
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> KdTree::nearest(const Vec3& query, std::size_t k) const {
  k = std::min(k, size());
  if (k == 0) return {};
  std::priority_queue<Neighbor> heap;  // max-heap on (distance, index)

  const auto visit = [&](auto&& self, std::size_t id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const Neighbor cand{squared_distance(query, point(order_[i])), order_[i]};
        if (heap.size() < k) heap.push(cand);
        else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      return;
    }
    const double diff = query[node.axis] - node.split;
    const std::size_t near = diff <= 0.0 ? node.left : node.right;
    const std::size_t far = diff <= 0.0 ? node.right : node.left;
    self(self, near);
    // Points beyond the plane are at least diff^2 away; equality must still
    // be explored because a tie may carry a lower index.
    if (heap.size() < k || diff * diff <= heap.top().distance_sq) self(self, far);
  };
  visit(visit, 0);

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

std::size_t KdTree::count_within(const Vec3& query, double radius_sq) const {
  if (size() == 0) return 0;
  std::size_t count = 0;
  const auto visit = [&](auto&& self, std::size_t id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i)
        if (squared_distance(query, point(order_[i])) < radius_sq) ++count;
      return;
    }
    const double diff = query[node.axis] - node.split;
    const std::size_t near = diff <= 0.0 ? node.left : node.right;
    const std::size_t far = diff <= 0.0 ? node.right : node.left;
    self(self, near);
    if (diff * diff < radius_sq) self(self, far);
  };
  visit(visit, 0);
  return count;
}

std::vector<Neighbor> nearest_brute_force(std::span<const double> xyz, const Vec3& query, std::size_t k) {
  const std::size_t n = xyz.size() / 3;
  std::vector<double> d2(n);
  simd::squared_distances(xyz, query.data(), d2);
  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = {d2[i], i};
  k = std::min(k, n);
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end());
  all.resize(k);
  return all;
}

}  // namespace gsaudio::scene
