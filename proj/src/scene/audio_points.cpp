#include "gsaudio/scene/audio_points.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gsaudio/error.hpp"
#include "gsaudio/scene/ply.hpp"

namespace gsaudio::scene {
namespace {

struct AttributeInfo {
  Attribute attr;
  const char* name;
  std::size_t width;
  const std::vector<float> GaussianCloud::*field;
};

constexpr AttributeInfo kOrder[] = {
    {Attribute::S, "S", 3, &GaussianCloud::scales},
    {Attribute::SH, "SH", kShWidth, &GaussianCloud::sh},
    {Attribute::R, "R", 4, &GaussianCloud::rotations},
    {Attribute::O, "O", 1, &GaussianCloud::opacities},
};

}  // namespace

AttributeSet AttributeSet::parse(std::string_view text) {
  AttributeSet out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const auto it = std::find_if(std::begin(kOrder), std::end(kOrder), [&](const auto& a) { return token == a.name; });
    if (it == std::end(kOrder)) throw ConfigError("unknown alpha attribute '" + token + "' (expected S, SH, R or O)");
    out.bits_ |= static_cast<unsigned>(it->attr);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '+' || std::isspace(static_cast<unsigned char>(c))) flush();
    else token += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  flush();
  if (out.empty()) throw ConfigError("alpha attribute selection is empty");
  return out;
}

std::size_t AttributeSet::width() const noexcept {
  std::size_t w = 0;
  for (const auto& a : kOrder)
    if (contains(a.attr)) w += a.width;
  return w;
}

std::string AttributeSet::to_string() const {
  std::string out;
  for (const auto& a : kOrder)
    if (contains(a.attr)) out += (out.empty() ? "" : ",") + std::string(a.name);
  return out;
}

AudioPointSet AudioPointSet::subset(std::span<const std::size_t> indices) const {
  return {positions.select_rows(indices), alpha.select_rows(indices)};
}

void validate(const AudioPointSet& points) {
  if (points.positions.cols() != 3 || points.positions.shape().size() != 2)
    throw DataError("audio point positions must be N x 3");
  if (points.alpha.rows() != points.positions.rows() || points.alpha.shape().size() != 2)
    throw DataError("audio point alpha rows differ from the point count");
  if (!points.positions.all_finite() || !points.alpha.all_finite()) throw DataError("audio points are not finite");
}

AudioPointSet init_audio_points(const GaussianCloud& cloud, AttributeSet selection) {
  if (selection.empty()) throw ConfigError("alpha attribute selection is empty");
  validate(cloud);
  const std::size_t n = cloud.size();
  if (n == 0) throw DataError("gaussian cloud has no points");
  const std::size_t width = selection.width();
  AudioPointSet out{core::Tensor::zeros(n, 3), core::Tensor::zeros(n, width)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) out.positions(i, c) = cloud.positions[3 * i + c];
    std::size_t col = 0;
    for (const auto& a : kOrder) {
      if (!selection.contains(a.attr)) continue;
      const auto& src = cloud.*a.field;
      for (std::size_t k = 0; k < a.width; ++k) out.alpha(i, col++) = src[i * a.width + k];
    }
  }
  return out;
}

void save_audio_points(const std::filesystem::path& path, const AudioPointSet& points) {
  validate(points);
  PlyTable table;
  table.count = points.size();
  const char* axes[] = {"x", "y", "z"};
  for (std::size_t c = 0; c < 3; ++c) {
    table.properties.push_back({axes[c], PlyScalar::float64});
    std::vector<double> col(table.count);
    for (std::size_t i = 0; i < table.count; ++i) col[i] = points.positions(i, c);
    table.columns.push_back(std::move(col));
  }
  for (std::size_t c = 0; c < points.alpha_width(); ++c) {
    table.properties.push_back({"alpha_" + std::to_string(c), PlyScalar::float64});
    std::vector<double> col(table.count);
    for (std::size_t i = 0; i < table.count; ++i) col[i] = points.alpha(i, c);
    table.columns.push_back(std::move(col));
  }
  write_ply(path, table);
}

AudioPointSet load_audio_points(const std::filesystem::path& path) {
  const PlyTable table = read_ply(path);
  std::size_t width = 0;
  while (table.find("alpha_" + std::to_string(width)) >= 0) ++width;
  if (width == 0) throw SchemaError("alpha_0", path.string() + ": no alpha columns");
  if (table.count == 0) throw DataError(path.string() + ": no points");
  AudioPointSet out{core::Tensor::zeros(table.count, 3), core::Tensor::zeros(table.count, width)};
  const char* axes[] = {"x", "y", "z"};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& col = table.column(axes[c]);
    for (std::size_t i = 0; i < table.count; ++i) out.positions(i, c) = col[i];
  }
  for (std::size_t c = 0; c < width; ++c) {
    const auto& col = table.column("alpha_" + std::to_string(c));
    for (std::size_t i = 0; i < table.count; ++i) out.alpha(i, c) = col[i];
  }
  validate(out);
  return out;
}

}  // namespace gsaudio::scene
