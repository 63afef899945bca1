#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gsaudio/core/linear.hpp"
#include "gsaudio/core/tape.hpp"
#include "gsaudio/scene/audio_points.hpp"
#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::field {

inline constexpr std::size_t kHiddenWidth = 64;
inline constexpr std::size_t kContextWidth = 64;

/// F: [alpha, guidance] -> relu(hidden) -> context. Shared by the source
/// and listener branches.
struct FieldNetwork {
  core::Linear hidden;
  core::Linear output;

  std::size_t alpha_width() const noexcept { return hidden.in() - 3; }
  std::size_t context_width() const noexcept { return output.out(); }

  static FieldNetwork random(std::size_t alpha_width, std::mt19937_64& rng,
                             std::size_t hidden_width = kHiddenWidth, std::size_t context_width = kContextWidth);
  static FieldNetwork zeros(std::size_t alpha_width, std::size_t hidden_width = kHiddenWidth,
                            std::size_t context_width = kContextWidth);

  /// Stable (name, tensor) order used for checkpoints and parameter ids.
  std::vector<std::pair<std::string, const core::Tensor*>> tensors() const;
  std::vector<core::Tensor*> parameters();
};

/// (point - anchor) / |point - anchor|. Throws GeometryError when the two
/// are within 1e-9 of each other.
scene::Vec3 position_guidance(const scene::Vec3& point, const scene::Vec3& anchor);

/// position_guidance(), or the zero vector for coincident points.
scene::Vec3 guidance_or_zero(const scene::Vec3& point, const scene::Vec3& anchor);

/// F(alpha, guidance) for one point as a 1 x context tensor.
core::Tensor point_context(const FieldNetwork& net, std::span<const double> alpha, const scene::Vec3& guidance);

/// Source and listener vicinities, each in ascending index order so that the
/// pooled mean is summed in a fixed order.
struct Vicinities {
  std::vector<std::size_t> source;
  std::vector<std::size_t> listener;
};

Vicinities find_vicinities(const scene::AudioPointSet& points, const scene::Vec3& listener,
                           const scene::Vec3& source, double percentile);

/// Differentiable C = mean_S F ⊕ mean_L F (1 x 2*context). `alpha` is the
/// recorded (N x D) guidance matrix; positions are constants.
core::Var pooled_context(const FieldNetwork& net, core::Var alpha, const scene::AudioPointSet& points,
                         const scene::Vec3& listener, const scene::Vec3& source, const Vicinities& vicinities,
                         core::ParamBinder& binder);

/// Inference convenience on a private tape.
core::Tensor pooled_context(const FieldNetwork& net, const scene::AudioPointSet& points,
                            const scene::Pose& listener, const scene::Vec3& source, double percentile);

void save_field(const std::filesystem::path& path, const FieldNetwork& net, std::uint64_t seed);
FieldNetwork load_field(const std::filesystem::path& path);

}  // namespace gsaudio::field
