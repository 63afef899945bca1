#include "gsaudio/datagen/room.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "gsaudio/dsp/fft.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::datagen {
namespace {

double windowed_sinc(double x) {
  if (std::fabs(x) >= kSincHalfWidth + 1) return 0.0;
  const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * x / (kSincHalfWidth + 1)));
  if (x == 0.0) return w;
  const double px = std::numbers::pi * x;
  return w * std::sin(px) / px;
}

void require_inside(const ShoeboxRoom& room, const scene::Vec3& p, const char* what) {
  if (!inside(room, p))
    throw GeometryError(std::string(what) + " (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                        std::to_string(p[2]) + ") is not strictly inside the room");
}

}  // namespace

void validate(const ShoeboxRoom& room) {
  for (double d : room.dimensions)
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("room dimensions must be positive");
  for (double a : room.absorption)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("wall absorption must lie in [0, 1]");
  if (!(room.speed_of_sound > 0.0)) throw ConfigError("speed of sound must be positive");
  if (room.sample_rate <= 0) throw ConfigError("sample rate must be positive");
}

bool inside(const ShoeboxRoom& room, const scene::Vec3& p, double margin) {
  for (int a = 0; a < 3; ++a)
    if (!(p[a] > margin && p[a] < room.dimensions[a] - margin)) return false;
  return true;
}

std::vector<ImageSource> image_sources(const ShoeboxRoom& room, const scene::Vec3& source, int max_order) {
  if (max_order < 0) throw ContractViolation("image source order must be non-negative");
  std::array<double, 6> beta{};
  for (int w = 0; w < 6; ++w) beta[w] = std::sqrt(1.0 - room.absorption[w]);

  // Per axis: image coordinate (1 - 2q) s + 2 n L with |n - q| hits on the
  // near wall and |n| on the far wall.
  struct AxisImage {
    double coord;
    int order;
    double gain;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    for (int n = -max_order; n <= max_order; ++n) {
      for (int q = 0; q <= 1; ++q) {
        const int near = std::abs(n - q), far = std::abs(n);
        if (near + far > max_order) continue;
        axes[a].push_back({(1 - 2 * q) * source[a] + 2.0 * n * room.dimensions[a], near + far,
                           std::pow(beta[2 * a], near) * std::pow(beta[2 * a + 1], far)});
      }
    }
  }
  std::vector<ImageSource> out;
  for (const auto& x : axes[0])
    for (const auto& y : axes[1])
      for (const auto& z : axes[2]) {
        const int order = x.order + y.order + z.order;
        if (order <= max_order) out.push_back({{{x.coord, y.coord, z.coord}}, order, x.gain * y.gain * z.gain});
      }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
  return out;
}

dsp::ImpulseResponse image_source_rir(const ShoeboxRoom& room, const scene::Vec3& source, const scene::Vec3& receiver,
                                      int max_order, std::size_t length) {
  validate(room);
  require_inside(room, source, "source");
  require_inside(room, receiver, "receiver");
  const auto images = image_sources(room, source, max_order);
  const double samples_per_meter = room.sample_rate / room.speed_of_sound;

  if (length == 0) {
    double last = 0.0;
    for (const auto& img : images)
      if (img.gain != 0.0) last = std::max(last, scene::norm(img.position - receiver) * samples_per_meter);
    length = static_cast<std::size_t>(std::ceil(last)) + kSincHalfWidth + 1;
  }
  dsp::ImpulseResponse h;
  h.sample_rate = room.sample_rate;
  h.samples.assign(length, 0.0);
  for (const auto& img : images) {
    if (img.gain == 0.0) continue;
    const double d = scene::norm(img.position - receiver);
    const double delay = d * samples_per_meter;
    const double amp = img.gain / d;
    const long centre = std::lround(delay);
    for (long n = centre - kSincHalfWidth; n <= centre + kSincHalfWidth; ++n) {
      if (n < 0 || n >= static_cast<long>(length)) continue;
      h.samples[static_cast<std::size_t>(n)] += amp * windowed_sinc(static_cast<double>(n) - delay);
    }
  }
  return h;
}

scene::Vec3 left_axis(const scene::Pose& listener) {
  const scene::Vec3 l{{-listener.direction[1], listener.direction[0], 0.0}};
  const double n = scene::norm(l);
  if (!(n > 1e-9)) throw GeometryError("listener direction is vertical; the lateral axis is undefined");
  return (1.0 / n) * l;
}

EarPositions ear_positions(const scene::Pose& listener) {
  const scene::Vec3 l = left_axis(listener);
  return {listener.position + kHeadRadius * l, listener.position - kHeadRadius * l};
}

std::array<double, 2> head_shadow_gains(const scene::Pose& listener, const scene::Vec3& source) {
  const scene::Vec3 l = left_axis(listener);
  const scene::Vec3 to_source = source - listener.position;
  const double d = scene::norm(to_source);
  if (!(d > 0.0)) throw GeometryError("source coincides with the listener");
  const double cos_left = scene::dot(l, to_source) / d;
  return {1.0 - kHeadShadow * (1.0 - cos_left) / 2.0, 1.0 - kHeadShadow * (1.0 + cos_left) / 2.0};
}

dsp::BinauralIr ear_impulse_responses(const ShoeboxRoom& room, const scene::Vec3& source,
                                      const scene::Pose& listener, int max_order, std::size_t length) {
  const auto ears = ear_positions(listener);
  const auto gains = head_shadow_gains(listener, source);
  if (length == 0) {
    // Size both ears identically so the channels stay aligned.
    length = std::max(image_source_rir(room, source, ears.left, max_order).samples.size(),
                      image_source_rir(room, source, ears.right, max_order).samples.size());
  }
  dsp::BinauralIr ir{image_source_rir(room, source, ears.left, max_order, length),
                     image_source_rir(room, source, ears.right, max_order, length)};
  for (double& v : ir.left.samples) v *= gains[0];
  for (double& v : ir.right.samples) v *= gains[1];
  return ir;
}

dsp::StereoWaveform binaural_render(const ShoeboxRoom& room, const scene::Vec3& source, const scene::Pose& listener,
                                    const dsp::Waveform& mono, int max_order) {
  dsp::validate(mono);
  if (mono.sample_rate != room.sample_rate) throw ContractViolation("mono sample rate differs from the room's");
  const auto ir = ear_impulse_responses(room, source, listener, max_order);
  dsp::StereoWaveform out;
  out.left.sample_rate = out.right.sample_rate = mono.sample_rate;
  out.left.samples = dsp::convolve(mono.samples, ir.left.samples);
  out.right.samples = dsp::convolve(mono.samples, ir.right.samples);
  out.left.samples.resize(mono.size());
  out.right.samples.resize(mono.size());
  return out;
}

}  // namespace gsaudio::datagen
