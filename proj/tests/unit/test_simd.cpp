#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gsaudio/simd/kernels.hpp"

using namespace gsaudio::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out;
  if (isa_supported(Isa::avx2)) out.push_back(avx2_kernels());
  if (isa_supported(Isa::neon)) out.push_back(neon_kernels());
  return out;
}

}  // namespace

TEST_CASE("scalar kernels compute textbook results") {
  const auto& k = scalar_kernels();
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(k.dot(a.data(), b.data(), 3) == 32.0);
  k.axpy(2.0, a.data(), b.data(), 3);
  CHECK(b == std::vector<double>{6, 9, 12});
  CHECK(k.sum_squares(a.data(), 3) == 14.0);

  // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
  std::vector<double> m1{1, 2, 3, 4}, m2{5, 6, 7, 8}, c(4, 0.0);
  k.gemm_accumulate(2, 2, 2, m1.data(), m2.data(), c.data());
  CHECK(c == std::vector<double>{19, 22, 43, 50});

  std::vector<double> xyz{0, 0, 0, 1, 2, 2};
  const double center[3] = {0, 0, 0};
  std::vector<double> d(2);
  k.squared_distances(xyz.data(), 2, center, d.data());
  CHECK(d == std::vector<double>{0, 9});
}

TEST_CASE("SIMD variants agree with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_kernels();
  for (const KernelTable* k : variants()) {
    CAPTURE(isa_name(k->isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 257u, 1000u}) {
      auto a = random_vector(n, rng);
      auto b = random_vector(n, rng);
      const double expect = ref.dot(a.data(), b.data(), n);
      CHECK(k->dot(a.data(), b.data(), n) == doctest::Approx(expect).epsilon(1e-12).scale(static_cast<double>(n) + 1.0));
      CHECK(k->sum_squares(a.data(), n) == doctest::Approx(ref.sum_squares(a.data(), n)).epsilon(1e-12));

      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      k->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));
    }

    for (auto [m, n, kk] : std::vector<std::array<std::size_t, 3>>{
             {1, 1, 1}, {2, 16, 3}, {3, 17, 5}, {5, 37, 11}, {64, 128, 55}, {257, 64, 20}}) {
      auto a = random_vector(m * kk, rng);
      auto b = random_vector(kk * n, rng);
      auto c0 = random_vector(m * n, rng);
      auto c1 = c0;
      ref.gemm_accumulate(m, n, kk, a.data(), b.data(), c0.data());
      k->gemm_accumulate(m, n, kk, a.data(), b.data(), c1.data());
      double worst = 0.0;
      for (std::size_t i = 0; i < c0.size(); ++i) worst = std::max(worst, std::fabs(c0[i] - c1[i]));
      CHECK(worst < 1e-12 * static_cast<double>(kk + 1));
    }

    for (std::size_t count : {1u, 4u, 5u, 100u, 1023u}) {
      auto xyz = random_vector(3 * count, rng);
      const double center[3] = {0.1, -0.3, 0.25};
      std::vector<double> d0(count), d1(count);
      ref.squared_distances(xyz.data(), count, center, d0.data());
      k->squared_distances(xyz.data(), count, center, d1.data());
      CHECK(d0 == d1);  // bit-identical by contract
    }
  }
}

TEST_CASE("runtime selection can be overridden") {
  const Isa before = active_isa();
  select(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  std::vector<double> a{1, 2}, b{3, 4};
  CHECK(dot(a, b) == 11.0);
  if (isa_supported(before)) select(before);
  CHECK(active_isa() == before);
}
