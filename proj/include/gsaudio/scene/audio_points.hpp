#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gsaudio/core/tensor.hpp"
#include "gsaudio/scene/gaussian_cloud.hpp"
#include "gsaudio/scene/geometry.hpp"

namespace gsaudio::scene {

enum class Attribute : unsigned { S = 1u, SH = 2u, R = 4u, O = 8u };

/// Subset of the physical attributes copied into alpha. Concatenation order
/// is always S, SH, R, O regardless of how the set was spelled.
class AttributeSet {
 public:
  constexpr AttributeSet() = default;
  constexpr AttributeSet(std::initializer_list<Attribute> attrs) {
    for (auto a : attrs) bits_ |= static_cast<unsigned>(a);
  }

  static AttributeSet defaults() { return {Attribute::SH, Attribute::R}; }
  /// Parses names such as "SH,R" or "S+O"; throws ConfigError.
  static AttributeSet parse(std::string_view text);

  bool contains(Attribute a) const noexcept { return (bits_ & static_cast<unsigned>(a)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t width() const noexcept;
  std::string to_string() const;

  friend bool operator==(AttributeSet, AttributeSet) = default;

 private:
  unsigned bits_ = 0;
};

/// G_a: positions (N x 3) and learnable guidance vectors alpha (N x D).
struct AudioPointSet {
  core::Tensor positions;
  core::Tensor alpha;

  std::size_t size() const noexcept { return positions.rows(); }
  std::size_t alpha_width() const noexcept { return alpha.cols(); }
  Vec3 position(std::size_t i) const { return {positions(i, 0), positions(i, 1), positions(i, 2)}; }
  /// Keeps rows `indices`, in order.
  AudioPointSet subset(std::span<const std::size_t> indices) const;
};

/// Throws DataError on shape mismatches or non-finite entries.
void validate(const AudioPointSet& points);

/// Copies positions and the raw stored values of the selected attributes.
AudioPointSet init_audio_points(const GaussianCloud& cloud, AttributeSet selection = AttributeSet::defaults());

/// PLY with double properties x, y, z, alpha_0..alpha_{D-1}.
void save_audio_points(const std::filesystem::path& path, const AudioPointSet& points);
AudioPointSet load_audio_points(const std::filesystem::path& path);

}  // namespace gsaudio::scene
