#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gsaudio/dsp/waveform.hpp"
#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::datagen {

inline constexpr double kHeadRadius = 0.0875;
inline constexpr double kHeadShadow = 0.7;
inline constexpr int kSincHalfWidth = 16;

/// Axis-aligned room [0, Lx] x [0, Ly] x [0, Lz]. Absorption order:
/// x = 0, x = Lx, y = 0, y = Ly, z = 0, z = Lz.
struct ShoeboxRoom {
  scene::Vec3 dimensions{{6.0, 4.0, 3.0}};
  std::array<double, 6> absorption{0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  double speed_of_sound = 343.0;
  int sample_rate = dsp::kDefaultSampleRate;
};

/// Throws ConfigError on non-positive sizes or absorption outside [0, 1].
void validate(const ShoeboxRoom& room);

/// True when p is inside the room with at least `margin` to every wall.
bool inside(const ShoeboxRoom& room, const scene::Vec3& p, double margin = 0.0);

struct ImageSource {
  scene::Vec3 position;
  int order = 0;
  double gain = 1.0;  // product of wall reflection coefficients
};

/// Image sources with reflection order <= max_order (Allen-Berkley lattice).
std::vector<ImageSource> image_sources(const ShoeboxRoom& room, const scene::Vec3& source, int max_order);

/// Sum of gain/d impulses at delay d/c, each placed with a Hann-windowed sinc.
/// `length` 0 sizes the response to its last non-zero arrival. Throws
/// GeometryError unless both points lie strictly inside the room.
dsp::ImpulseResponse image_source_rir(const ShoeboxRoom& room, const scene::Vec3& source,
                                      const scene::Vec3& receiver, int max_order, std::size_t length = 0);

/// Unit vector to the listener's left: (-d_y, d_x, 0) normalized.
scene::Vec3 left_axis(const scene::Pose& listener);

struct EarPositions {
  scene::Vec3 left;
  scene::Vec3 right;
};
EarPositions ear_positions(const scene::Pose& listener);

/// Frequency-independent head shadow for each ear: 1 - h (1 - cos phi) / 2
/// where phi is the angle between the ear's outward axis and the direction
/// from the head centre to the source.
std::array<double, 2> head_shadow_gains(const scene::Pose& listener, const scene::Vec3& source);

/// Per-ear impulse responses including the head-shadow gain.
dsp::BinauralIr ear_impulse_responses(const ShoeboxRoom& room, const scene::Vec3& source,
                                      const scene::Pose& listener, int max_order, std::size_t length = 0);

/// Mono convolved with each ear response, truncated to the mono length.
dsp::StereoWaveform binaural_render(const ShoeboxRoom& room, const scene::Vec3& source, const scene::Pose& listener,
                                    const dsp::Waveform& mono, int max_order);

}  // namespace gsaudio::datagen
