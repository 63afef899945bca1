#pragma once

// Checkpoint weight files: an 8-byte magic "GSAWGT01", a little-endian u64
// header length, a UTF-8 JSON header, then every tensor listed in
// header["tensors"] as little-endian IEEE-754 binary64 in row-major order.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gsaudio/core/tensor.hpp"

namespace gsaudio::core {

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct WeightsFile {
  nlohmann::json header;
  std::vector<NamedTensor> tensors;

  /// Throws SchemaError naming the tensor when absent.
  const Tensor& get(const std::string& name) const;
};

/// `header` gains a "tensors" array describing names and shapes.
void write_weights(const std::filesystem::path& path, nlohmann::json header,
                   const std::vector<std::pair<std::string, const Tensor*>>& tensors);

WeightsFile read_weights(const std::filesystem::path& path);

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace gsaudio::core
