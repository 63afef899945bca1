#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gsaudio/dsp/metrics.hpp"
#include "gsaudio/error.hpp"
#include "oracles.hpp"

using namespace gsaudio;
using namespace gsaudio::dsp;

namespace {

constexpr double kPi = std::numbers::pi;

Waveform noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 0.5);
  Waveform w;
  w.samples.resize(n);
  for (auto& v : w.samples) v = dist(rng);
  return w;
}

StereoWaveform noise_pair(std::size_t n, std::mt19937_64& rng) { return {noise(n, rng), noise(n, rng)}; }

StereoWaveform scaled(const StereoWaveform& w, double k) {
  StereoWaveform out = w;
  for (auto& v : out.left.samples) v *= k;
  for (auto& v : out.right.samples) v *= k;
  return out;
}

}  // namespace

TEST_CASE("MAG: identity, scaling and non-negativity") {
  std::mt19937_64 rng(1);
  const auto gt = noise_pair(4000, rng);
  CHECK(mag_distance(gt, gt) == 0.0);
  StereoWaveform silent = scaled(gt, 0.0);
  CHECK(mag_distance(scaled(gt, 2.0), gt) == doctest::Approx(mag_distance(silent, gt)).epsilon(1e-12));
  const auto other = noise_pair(4000, rng);
  CHECK(mag_distance(other, gt) > 0.0);
  CHECK(mag_distance(other, gt) == doctest::Approx(mag_distance(gt, other)).epsilon(1e-12));
}

TEST_CASE("MAG matches a brute-force double loop") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = noise_pair(1500 + 317 * trial, rng);
    const auto b = noise_pair(1500 + 317 * trial, rng);
    const double expected = 0.5 * (oracle::mag_channel(a.left, b.left) + oracle::mag_channel(a.right, b.right));
    CHECK(std::fabs(mag_distance(a, b) - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("ENV: identity, sign flip and non-negativity") {
  std::mt19937_64 rng(3);
  const auto gt = noise_pair(3000, rng);
  CHECK(env_distance(gt, gt) == 0.0);
  CHECK(env_distance(scaled(gt, -1.0), gt) < 1e-12);
  CHECK(env_distance(noise_pair(3000, rng), gt) > 0.0);
}

TEST_CASE("ENV matches a direct-DFT analytic signal") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {257u, 600u}) {
    const auto a = noise_pair(n, rng);
    const auto b = noise_pair(n, rng);
    const double expected = 0.5 * (oracle::env_channel(a.left, b.left) + oracle::env_channel(a.right, b.right));
    CHECK(std::fabs(env_distance(a, b) - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("envelope of a pure sine is its amplitude away from the edges") {
  const double amplitude = 0.7;
  std::vector<double> x(22050);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = amplitude * std::sin(2.0 * kPi * 440.0 * i / 22050.0 + 0.3);
  const auto env = envelope(x);
  for (std::size_t i = 1000; i + 1000 < env.size(); ++i) CHECK(std::fabs(env[i] - amplitude) < 0.02 * amplitude);
}

TEST_CASE("length mismatch is a contract violation") {
  std::mt19937_64 rng(5);
  const auto a = noise_pair(1000, rng);
  const auto b = noise_pair(999, rng);
  CHECK_THROWS_AS(mag_distance(a, b), ContractViolation);
  CHECK_THROWS_AS(env_distance(a, b), ContractViolation);
}
