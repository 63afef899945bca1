#pragma once

// Minimal PLY support for vertex tables: binary little-endian (read/write)
// and ASCII (read only). Other elements are skipped; list properties are
// rejected.

#include <filesystem>
#include <string>
#include <vector>

namespace gsaudio::scene {

enum class PlyScalar { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

struct PlyProperty {
  std::string name;
  PlyScalar type = PlyScalar::float32;
};

/// Vertex element, stored column-wise. Values are widened to double, which
/// is exact for every supported scalar type.
struct PlyTable {
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
  std::vector<std::vector<double>> columns;

  /// Index of a property, or -1.
  long find(const std::string& name) const;
  /// Column of a property; throws SchemaError naming it when absent.
  const std::vector<double>& column(const std::string& name) const;
};

PlyTable read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const PlyTable& table);

}  // namespace gsaudio::scene
