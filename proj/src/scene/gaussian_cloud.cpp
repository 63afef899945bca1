#include "gsaudio/scene/gaussian_cloud.hpp"

#include <cmath>
#include <string>

#include "gsaudio/error.hpp"
#include "gsaudio/scene/ply.hpp"

namespace gsaudio::scene {
namespace {

struct Group {
  std::vector<float> GaussianCloud::*field;
  const char* label;
  std::vector<std::string> names;
};

std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// File column order of the common splatting schema.
std::vector<Group> schema() {
  std::vector<std::string> sh = numbered("f_dc_", 3);
  for (auto& n : numbered("f_rest_", kShWidth - 3)) sh.push_back(n);
  return {{&GaussianCloud::positions, "position", {"x", "y", "z"}},
          {&GaussianCloud::sh, "sh", sh},
          {&GaussianCloud::opacities, "opacity", {"opacity"}},
          {&GaussianCloud::scales, "scale", numbered("scale_", 3)},
          {&GaussianCloud::rotations, "rotation", numbered("rot_", 4)}};
}

}  // namespace

void GaussianCloud::resize(std::size_t n) {
  positions.resize(3 * n);
  rotations.resize(4 * n);
  scales.resize(3 * n);
  opacities.resize(n);
  sh.resize(kShWidth * n);
}

void validate(const GaussianCloud& cloud) {
  const std::size_t n = cloud.size();
  if (cloud.positions.size() != 3 * n || cloud.rotations.size() != 4 * n || cloud.scales.size() != 3 * n ||
      cloud.sh.size() != kShWidth * n)
    throw DataError("gaussian cloud attribute arrays differ in length");
  for (const auto& g : schema())
    for (float v : cloud.*g.field)
      if (!std::isfinite(v)) throw DataError(std::string("gaussian cloud has non-finite ") + g.label + " values");
  for (std::size_t i = 0; i < n; ++i) {
    const float* q = &cloud.rotations[4 * i];
    if (q[0] == 0.0f && q[1] == 0.0f && q[2] == 0.0f && q[3] == 0.0f)
      throw DataError("point " + std::to_string(i) + " has a zero quaternion");
  }
}

GaussianCloud load_point_cloud(const std::filesystem::path& path) {
  const PlyTable table = read_ply(path);
  GaussianCloud cloud;
  cloud.resize(table.count);
  for (const auto& g : schema()) {
    auto& dst = cloud.*g.field;
    const std::size_t width = g.names.size();
    for (std::size_t c = 0; c < width; ++c) {
      const auto& col = table.column(g.names[c]);
      for (std::size_t i = 0; i < table.count; ++i) {
        if (!std::isfinite(col[i]))
          throw DataError(path.string() + ": non-finite value in '" + g.names[c] + "' at point " + std::to_string(i));
        dst[i * width + c] = static_cast<float>(col[i]);
      }
    }
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    float* q = &cloud.rotations[4 * i];
    const double n = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] + double(q[3]) * q[3]);
    if (n == 0.0) throw DataError(path.string() + ": zero quaternion at point " + std::to_string(i));
    if (std::fabs(n - 1.0) > 1e-6)
      for (int k = 0; k < 4; ++k) q[k] = static_cast<float>(q[k] / n);
  }
  return cloud;
}

void save_point_cloud(const std::filesystem::path& path, const GaussianCloud& cloud) {
  validate(cloud);
  PlyTable table;
  table.count = cloud.size();
  for (const auto& g : schema()) {
    const auto& src = cloud.*g.field;
    const std::size_t width = g.names.size();
    for (std::size_t c = 0; c < width; ++c) {
      table.properties.push_back({g.names[c], PlyScalar::float32});
      std::vector<double> col(table.count);
      for (std::size_t i = 0; i < table.count; ++i) col[i] = src[i * width + c];
      table.columns.push_back(std::move(col));
    }
  }
  write_ply(path, table);
}

}  // namespace gsaudio::scene
