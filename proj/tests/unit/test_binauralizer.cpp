#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gsaudio/binaural/binauralizer.hpp"
#include "gsaudio/core/gradcheck.hpp"
#include "gsaudio/error.hpp"

using namespace gsaudio;
using namespace gsaudio::binaural;

namespace {

constexpr double kPi = std::numbers::pi;

const SceneBounds kRoom{{{0.0, 0.0, 0.0}}, {{6.0, 4.0, 3.0}}};

core::Tensor random_context(std::size_t width, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  core::Tensor c = core::Tensor::zeros(1, width);
  for (double& v : c.data()) v = n(rng);
  return c;
}

dsp::Waveform noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 0.2);
  dsp::Waveform w;
  w.samples.resize(n);
  for (double& v : w.samples) v = d(rng);
  return w;
}

AcousticMasks constant_masks(double m, double d, std::size_t bins = 257) {
  return {std::vector<double>(bins, m), std::vector<double>(bins, d)};
}

}  // namespace

TEST_CASE("positional encoding") {
  const auto zero = positional_encoding(std::vector<double>{0.0}, 10);
  REQUIRE(zero.size() == 20);
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero[i] == (i % 2 ? 1.0 : 0.0));
  const auto one = positional_encoding(std::vector<double>{1.0}, 1);
  REQUIRE(one.size() == 2);
  CHECK(std::fabs(one[0]) < 1e-15);
  CHECK(one[1] == -1.0);
  CHECK(positional_encoding(std::vector<double>{0.3, 0.7}, 10).size() == 40);
  const auto e = positional_encoding(std::vector<double>{0.3}, 4);
  for (int l = 0; l < 4; ++l) {
    CHECK(e[2 * l] == doctest::Approx(std::sin(std::pow(2.0, l) * kPi * 0.3)).epsilon(1e-14));
    CHECK(e[2 * l + 1] == doctest::Approx(std::cos(std::pow(2.0, l) * kPi * 0.3)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(positional_encoding(std::vector<double>{1.0}, 0), ContractViolation);
}

TEST_CASE("direction transform") {
  CHECK(transform_direction(0.0) == std::array<double, 2>{0.0, 1.0});
  const auto q = transform_direction(kPi / 2);
  CHECK(q[0] == 1.0);
  CHECK(std::fabs(q[1]) < 1e-16);
  for (double t : {-2.0, 0.1, 1.3, 3.0}) {
    const auto a = transform_direction(t), b = transform_direction(t + 2 * kPi);
    CHECK(std::fabs(a[0] - b[0]) < 1e-12);
    CHECK(std::fabs(a[1] - b[1]) < 1e-12);
  }
}

TEST_CASE("listener normalization uses the scene bounds") {
  const auto xy = kRoom.normalize_xy({{3.0, 1.0, 2.0}});
  CHECK(xy[0] == 0.5);
  CHECK(xy[1] == 0.25);
  const SceneBounds unit{};
  const auto again = unit.normalize_xy({{xy[0], xy[1], 0.0}});
  CHECK(again == xy);
}

TEST_CASE("zero network gives unit mixture and zero difference") {
  const auto net = MaskNetwork::zeros(Mode::binaural, 128, 128, kRoom);
  std::mt19937_64 rng(1);
  const auto masks = query_masks(net, scene::Pose::from_yaw({{1, 1, 1.5}}, 0.4), random_context(128, rng), 257);
  REQUIRE(masks.mixture.size() == 257);
  REQUIRE(masks.difference.size() == 257);
  for (double m : masks.mixture) CHECK(m == 1.0);
  for (double d : masks.difference) CHECK(d == 0.0);
}

TEST_CASE("mask ranges hold on random weights and inputs") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = MaskNetwork::random(Mode::binaural, 32, 16, kRoom, rng);
    for (core::Tensor* t : net.parameters())
      for (double& v : t->data()) v *= 8.0;  // push the sigmoids into saturation
    const auto masks = query_masks(net, scene::Pose::from_yaw({{u(rng), u(rng), 1.0}}, u(rng)),
                                   random_context(16, rng), 129);
    for (std::size_t k = 0; k < 129; ++k) {
      CHECK(masks.mixture[k] >= 0.0);
      CHECK(masks.mixture[k] <= 2.0);
      CHECK(masks.difference[k] >= -1.0);
      CHECK(masks.difference[k] <= 1.0);
    }
  }
}

TEST_CASE("mixture mask ignores the listener heading") {
  std::mt19937_64 rng(3);
  const auto net = MaskNetwork::random(Mode::binaural, 128, 128, kRoom, rng);
  const auto ctx = random_context(128, rng);
  const scene::Vec3 pos{{2.0, 1.5, 1.6}};
  const auto a = query_masks(net, scene::Pose::from_yaw(pos, 0.7), ctx, 257);
  const auto b = query_masks(net, scene::Pose::from_yaw(pos, -0.7), ctx, 257);
  CHECK(a.mixture == b.mixture);
  CHECK(a.difference != b.difference);
}

TEST_CASE("headings a half turn apart give different difference masks") {
  std::mt19937_64 rng(5);
  const auto net = MaskNetwork::random(Mode::binaural, 64, 64, kRoom, rng);
  const auto ctx = random_context(64, rng);
  const scene::Vec3 pos{{3.0, 2.0, 1.6}};
  const auto left = query_masks(net, scene::Pose::from_yaw(pos, kPi / 2), ctx, 129);
  const auto right = query_masks(net, scene::Pose::from_yaw(pos, -kPi / 2), ctx, 129);
  double gap = 0.0;
  for (std::size_t k = 0; k < 129; ++k) gap = std::max(gap, std::fabs(left.difference[k] - right.difference[k]));
  CHECK(gap > 1e-6);
}

TEST_CASE("binauralize identities") {
  const auto mono = noise(8000, 4);
  const auto mono_mag = dsp::stft(mono, {}).magnitude();

  const auto same = binauralize(mono, constant_masks(1.3, 0.0)).audio;
  CHECK(same.left.samples == same.right.samples);

  const auto full = binauralize(mono, constant_masks(2.0, 0.0));
  const auto lm = dsp::stft(full.audio.left, {}).magnitude();
  double worst = 0.0;
  for (std::size_t i = 0; i < lm.size(); ++i) worst = std::max(worst, std::fabs(lm[i] - mono_mag[i]));
  CHECK(worst < 1e-9);
  CHECK(full.clamped_fraction == 0.0);

  const auto hard_left = binauralize(mono, constant_masks(1.0, 1.0)).audio;
  for (double v : hard_left.right.samples) CHECK(v == 0.0);
  const auto l2 = dsp::stft(hard_left.left, {}).magnitude();
  worst = 0.0;
  for (std::size_t i = 0; i < l2.size(); ++i) worst = std::max(worst, std::fabs(l2[i] - mono_mag[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("channel gains sum to the mixture gain before clamping") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> m(0.0, 2.0), d(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double mm = m(rng), md = d(rng);
    CHECK(0.5 * (mm + md) + 0.5 * (mm - md) == doctest::Approx(mm).epsilon(1e-15));
  }
}

TEST_CASE("heavy clamping is reported") {
  const auto out = binauralize(noise(4000, 6), constant_masks(0.2, 1.0));
  CHECK(out.clamped_fraction > 0.4);
  CHECK_THROWS_AS(binauralize(noise(4000, 6), constant_masks(1.0, 0.0, 100)), ContractViolation);
}

TEST_CASE("RIR head") {
  std::mt19937_64 rng(7);
  const auto zero = MaskNetwork::zeros(Mode::rir, 256, 128, kRoom);
  const auto ctx = random_context(128, rng);
  const auto ir = predict_rir(zero, scene::Pose::from_yaw({{1, 2, 1.5}}, 0.0), ctx, 3000);
  CHECK(ir.left.samples.size() == 3000);
  for (double v : ir.left.samples) CHECK(v == 0.0);
  for (double v : ir.right.samples) CHECK(v == 0.0);

  const auto net = MaskNetwork::random(Mode::rir, 256, 128, kRoom, rng);
  const scene::Vec3 pos{{3.0, 2.0, 1.5}};
  std::vector<std::vector<double>> outputs;
  for (double deg : {0.0, 90.0, 180.0, 270.0}) {
    const auto r = predict_rir(net, scene::Pose::from_yaw(pos, deg * kPi / 180.0), ctx, 500);
    CHECK(r.left.samples.size() == 500);
    for (double v : r.left.samples) CHECK(std::fabs(v) <= 1.0);
    outputs.push_back(r.left.samples);
  }
  for (std::size_t a = 0; a < outputs.size(); ++a)
    for (std::size_t b = a + 1; b < outputs.size(); ++b) CHECK(outputs[a] != outputs[b]);
  CHECK_THROWS_AS(predict_rir(net, scene::Pose::from_yaw(pos, 0.0), ctx, 0), ContractViolation);
}

TEST_CASE("width mismatches are contract violations") {
  std::mt19937_64 rng(8);
  const auto net = MaskNetwork::random(Mode::binaural, 16, 32, kRoom, rng);
  CHECK_THROWS_AS(query_masks(net, scene::Pose::from_yaw({{1, 1, 1}}, 0.0), random_context(31, rng), 65),
                  ContractViolation);
}

TEST_CASE("loss gradients match finite differences for every tensor and the context") {
  std::mt19937_64 rng(9);
  for (Mode mode : {Mode::binaural, Mode::rir}) {
    auto net = MaskNetwork::random(mode, 12, 10, kRoom, rng);
    const auto ctx = random_context(10, rng);
    const auto in = ListenerInputs::from(net, scene::Pose::from_yaw({{2.5, 1.0, 1.5}}, 0.9));
    std::normal_distribution<double> n;
    core::Tensor target = core::Tensor::zeros(17, mode == Mode::binaural ? 2 : 2);
    for (double& v : target.data()) v = n(rng);
    const std::vector<std::size_t> times{0, 3, 7, 8, 11, 15, 20, 21, 30, 31, 33, 40, 41, 50, 55, 60, 63};

    auto params = net.parameters();
    const auto loss = [&](core::Tape& tape, core::ParamBinder& binder, core::Var context) {
      core::Var out;
      if (mode == Mode::binaural) {
        const auto m = forward_masks(net, context, in, 17, binder);
        const core::Var parts[] = {m.mixture, m.difference};
        out = core::concat_cols(parts);
      } else {
        out = forward_rir(net, context, in, times, 64, binder);
      }
      return core::mean(core::square(out - tape.constant(target)));
    };

    for (std::size_t p = 0; p < params.size(); ++p) {
      core::Tensor* tensor = params[p];
      const core::ScalarFunction f = [&](const core::Tensor& x, core::Tensor* grad) {
        const core::Tensor saved = *tensor;
        *tensor = x;
        core::Tape tape;
        core::ParamBinder binder(tape);
        binder.track(*tensor, {1});
        const auto l = loss(tape, binder, tape.constant(ctx));
        if (grad) *grad = tape.backward(l).at({1});
        *tensor = saved;
        return l.value().item();
      };
      // Sample among coordinates with a meaningful gradient: inputs such as
      // sin(0) make some entries zero up to rounding, and below ~1e-5 the
      // central difference itself is dominated by cancellation error.
      core::Tensor g = core::Tensor::zeros(tensor->rows(), tensor->cols());
      f(*tensor, &g);
      std::vector<std::size_t> live, coords;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (std::fabs(g[i]) > 1e-5) live.push_back(i);
      REQUIRE(!live.empty());
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      for (int i = 0; i < 12; ++i) coords.push_back(live[pick(rng)]);
      CAPTURE(p);
      CHECK(core::finite_difference_check(f, *tensor, 1e-6, coords) < 1e-4);
    }
    const core::ScalarFunction fc = [&](const core::Tensor& x, core::Tensor* grad) {
      core::Tape tape;
      core::ParamBinder binder(tape);
      const auto l = loss(tape, binder, tape.parameter({2}, x));
      if (grad) *grad = tape.backward(l).at({2});
      return l.value().item();
    };
    CHECK(core::finite_difference_check(fc, ctx, 1e-6) < 1e-4);
  }
}

TEST_CASE("checkpoint round trip keeps mode, bounds and weights") {
  std::mt19937_64 rng(10);
  for (Mode mode : {Mode::binaural, Mode::rir}) {
    const auto net = MaskNetwork::random(mode, 24, 16, kRoom, rng);
    const auto path = std::filesystem::temp_directory_path() / "gsaudio_test_masknet.bin";
    save_mask_network(path, net, 5);
    const auto back = load_mask_network(path);
    CHECK(back.mode == mode);
    CHECK(back.width == 24);
    CHECK(back.bounds.hi == kRoom.hi);
    const auto a = net.tensors(), b = back.tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].second == *b[i].second);
  }
}
