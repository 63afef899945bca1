#pragma once

#include <filesystem>
#include <vector>

namespace gsaudio::scene {

inline constexpr std::size_t kShWidth = 48;

/// Pretrained splat cloud as stored by splatting tools: raw (pre-activation)
/// opacity and log-scale, quaternion (w, x, y, z), degree-3 RGB SH with the
/// three DC terms first. Stored as float32, which is what the files hold.
struct GaussianCloud {
  std::vector<float> positions;  // 3 per point
  std::vector<float> rotations;  // 4 per point
  std::vector<float> scales;     // 3 per point
  std::vector<float> opacities;  // 1 per point
  std::vector<float> sh;         // 48 per point

  std::size_t size() const noexcept { return opacities.size(); }
  void resize(std::size_t n);
};

/// Throws DataError on length mismatches, non-finite values or zero quaternions.
void validate(const GaussianCloud& cloud);

/// Reads x,y,z / f_dc_0..2 / f_rest_0..44 / opacity / scale_0..2 / rot_0..3.
/// Extra properties are ignored. Quaternions are renormalized when their
/// norm is off by more than float precision.
GaussianCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const GaussianCloud& cloud);

}  // namespace gsaudio::scene
