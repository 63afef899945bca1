#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsaudio/core/linear.hpp"
#include "gsaudio/core/tape.hpp"
#include "gsaudio/mode.hpp"
#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::binaural {

using gsaudio::Mode;

inline constexpr int kEncodingLevels = 10;

/// [sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^(L-1) pi x), cos(2^(L-1) pi x)]
/// for each coordinate x in turn.
std::vector<double> positional_encoding(std::span<const double> v, int levels = kEncodingLevels);

/// (sin theta, cos theta).
std::array<double, 2> transform_direction(double theta);

/// Heading angle of a pose: its yaw when set, otherwise atan2(d_y, d_x).
double heading(const scene::Pose& pose);

/// Axis-aligned scene box used to map listener (x, y) into [0, 1]^2.
struct SceneBounds {
  scene::Vec3 lo{{0.0, 0.0, 0.0}};
  scene::Vec3 hi{{1.0, 1.0, 1.0}};

  std::array<double, 2> normalize_xy(const scene::Vec3& p) const;
};

/// Layers of one four-layer residual MLP: h1 = relu(L1 x), h2 = relu(L2 h1),
/// h3 = relu(L3 h2 + h1), out = L4 h3. The first layer is stored as a
/// per-query static block plus a per-row block so that inputs shared by every
/// row are multiplied only once.
struct ResidualMlp {
  core::Tensor first_static;   // (static inputs x W)
  core::Tensor first_rows;     // (row inputs x W)
  core::Tensor first_bias;     // (1 x W)
  core::Linear second, third, fourth;
};

/// Binauralizer B. In binaural mode MLP-1 runs per frequency bin on
/// [enc(x, y), enc(f/F), C] and yields a feature plus the mixture mask
/// m_m = 2 sigmoid(.); MLP-2 maps [feature, enc(sin theta, cos theta)] to the
/// difference mask m_d = 2 sigmoid(.) - 1. In RIR mode MLP-1 runs once on
/// [enc(x, y), C] and MLP-2 runs per time index on
/// [feature, enc(direction), enc(t/T)] with two output channels in [-1, 1].
struct MaskNetwork {
  Mode mode = Mode::binaural;
  std::size_t width = 128;
  std::size_t context_width = 128;
  int levels = kEncodingLevels;
  SceneBounds bounds;

  ResidualMlp mlp1;
  core::Linear mixture;  // (W x 1), binaural mode only
  ResidualMlp mlp2;

  static MaskNetwork random(Mode mode, std::size_t width, std::size_t context_width, const SceneBounds& bounds,
                            std::mt19937_64& rng);
  static MaskNetwork zeros(Mode mode, std::size_t width, std::size_t context_width, const SceneBounds& bounds);

  std::size_t output_channels() const noexcept { return mode == Mode::binaural ? 1 : 2; }

  std::vector<std::pair<std::string, const core::Tensor*>> tensors() const;
  std::vector<core::Tensor*> parameters();
};

inline std::size_t default_width(Mode mode) { return mode == Mode::binaural ? 128 : 256; }

/// Listener-dependent inputs shared by every query row.
struct ListenerInputs {
  std::array<double, 2> xy{};  // normalized
  double theta = 0.0;

  static ListenerInputs from(const MaskNetwork& net, const scene::Pose& listener);
};

struct MaskVars {
  core::Var mixture;     // (bins x 1), in (0, 2)
  core::Var difference;  // (bins x 1), in [-1, 1]
};

/// Differentiable mask query over `bins` frequencies (binaural mode).
MaskVars forward_masks(const MaskNetwork& net, core::Var context, const ListenerInputs& in, std::size_t bins,
                       core::ParamBinder& binder);

/// Differentiable IR query at the given sample indices out of `length`
/// (RIR mode): (times x 2) amplitudes in [-1, 1].
core::Var forward_rir(const MaskNetwork& net, core::Var context, const ListenerInputs& in,
                      std::span<const std::size_t> times, std::size_t length, core::ParamBinder& binder);

void save_mask_network(const std::filesystem::path& path, const MaskNetwork& net, std::uint64_t seed);
MaskNetwork load_mask_network(const std::filesystem::path& path);

}  // namespace gsaudio::binaural
