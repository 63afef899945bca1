#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "gsaudio/error.hpp"
#include "gsaudio/scene/kdtree.hpp"
#include "gsaudio/scene/queries.hpp"
#include "oracles.hpp"

using namespace gsaudio;
using namespace gsaudio::scene;

namespace {

AudioPointSet random_points(std::size_t n, std::mt19937_64& rng, double extent = 1.0, bool lattice = false) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::uniform_int_distribution<int> grid(-3, 3);
  AudioPointSet p{core::Tensor::zeros(n, 3), core::Tensor::zeros(n, 2)};
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) p.positions(i, c) = lattice ? 0.25 * grid(rng) : u(rng);
    p.alpha(i, 0) = static_cast<double>(i);
  }
  return p;
}

}  // namespace

TEST_CASE("vicinity size follows the percentile") {
  std::mt19937_64 rng(1);
  const auto p = random_points(100, rng);
  CHECK(vicinity(p, {0, 0, 0}, 15.0).size() == 15);
  CHECK(vicinity(p, {0, 0, 0}, 100.0).size() == 100);
  CHECK(vicinity(p, {0, 0, 0}, 0.1).size() == 1);
  CHECK(vicinity(p, {0, 0, 0}, 15.5).size() == 16);
  CHECK_THROWS_AS(vicinity(p, {0, 0, 0}, 0.0), ConfigError);
  CHECK_THROWS_AS(vicinity(p, {0, 0, 0}, 100.5), ConfigError);
  std::set<std::size_t> all;
  for (auto i : vicinity(p, {0, 0, 0}, 100.0)) all.insert(i);
  CHECK(all.size() == 100);
}

TEST_CASE("vicinity equals an exhaustive sort") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    // Alternate between the brute-force and k-d tree paths; lattices force ties.
    const std::size_t n = trial % 2 ? 200 : 300 + 37 * trial;
    const auto p = random_points(n, rng, 1.0, trial % 3 == 0);
    const Vec3 c{u(rng), u(rng), u(rng)};
    const double pct = trial % 5 == 0 ? 10.0 : 1.0 + trial;
    CHECK(vicinity(p, c, pct) == oracle::nearest(p, c, vicinity_count(n, pct)));
  }
}

TEST_CASE("k-d tree nearest and radius counts match brute force") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_points(50 + 40 * trial, rng, 1.0, trial % 4 == 1);
    const KdTree tree(p.positions.data(), 1 + trial % 9);
    const Vec3 c{u(rng), u(rng), u(rng)};
    const std::size_t k = 1 + trial * 3;
    CHECK(tree.nearest(c, k) == nearest_brute_force(p.positions.data(), c, k));
    const double r2 = 0.05 + 0.01 * trial;
    std::size_t count = 0;
    for (const auto& nb : nearest_brute_force(p.positions.data(), c, p.size())) count += nb.distance_sq < r2;
    CHECK(tree.count_within(c, r2) == count);
  }
}

TEST_CASE("vicinity is invariant under point permutation") {
  std::mt19937_64 rng(4);
  const auto p = random_points(400, rng);
  std::vector<std::size_t> perm(p.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto q = p.subset(perm);
  const Vec3 c{0.3, -0.2, 0.1};
  std::set<double> a, b;
  for (auto i : vicinity(p, c, 15.0)) a.insert(p.alpha(i, 0));
  for (auto i : vicinity(q, c, 15.0)) b.insert(q.alpha(i, 0));
  CHECK(a == b);
}

TEST_CASE("isolated point is pruned from a dense cluster") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  AudioPointSet p{core::Tensor::zeros(21, 3), core::Tensor::zeros(21, 1)};
  for (std::size_t i = 0; i < 20; ++i)
    for (int c = 0; c < 3; ++c) p.positions(i, c) = u(rng);
  p.positions(20, 0) = 5.0;
  const auto result = prune_outliers(p, 8, 0.1);
  CHECK(result.removed == std::vector<std::size_t>{20});
  CHECK(result.retained.size() == 20);
}

TEST_CASE("coincident points are never pruned below the point count") {
  AudioPointSet p{core::Tensor::filled(12, 3, 0.5), core::Tensor::zeros(12, 1)};
  for (std::size_t m : {0u, 5u, 11u}) CHECK(prune_outliers(p, m, 0.01).removed.empty());
}

TEST_CASE("pruning matches an O(N^2) neighbor count") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_points(trial % 2 ? 150 : 600, rng, 1.0, trial % 5 == 2);
    const std::size_t m = 1 + trial % 8;
    const double r = 0.1 + 0.01 * trial;
    const auto expected = oracle::outliers(p, m, r);
    const auto result = prune_outliers(p, m, r);
    if (expected.size() == p.size()) {
      CHECK(result.removed.empty());
      continue;
    }
    CHECK(std::set<std::size_t>(result.removed.begin(), result.removed.end()) == expected);
    CHECK(result.retained.size() + expected.size() == p.size());
  }
}

TEST_CASE("nearest neighbor distances") {
  AudioPointSet p{core::Tensor({3, 3}, {0, 0, 0, 3, 4, 0, 0, 0, 1}), core::Tensor::zeros(3, 1)};
  const auto d = nearest_neighbor_distances(p);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 5.0);
  CHECK(d[2] == 1.0);
}
