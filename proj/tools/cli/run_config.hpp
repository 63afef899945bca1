#pragma once

// Run configuration shared by every subcommand: one JSON document holding
// the dataset recipe, the training settings and the run-level paths.

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "gsaudio/datagen/dataset.hpp"
#include "gsaudio/train/config.hpp"

namespace gsaudio::cli {

inline constexpr int kRunConfigVersion = 1;

struct RunConfig {
  Mode mode = Mode::binaural;
  std::uint64_t seed = 0;
  /// Worker threads; 0 uses the hardware parallelism.
  unsigned threads = 0;
  std::filesystem::path out = "gsaudio_out";
  std::filesystem::path dataset = "gsaudio_data";
  /// Splat PLY for the initial points. When absent a synthetic cloud of
  /// scene_points points is drawn in the dataset's room.
  std::optional<std::filesystem::path> scene;
  std::size_t scene_points = 512;
  datagen::DatasetConfig data;
  train::TrainConfig train;

  /// Pushes the run-level mode and seed into the data and train sections.
  void propagate();
};

/// Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Reads and parses a config file. Throws IoError when unreadable and
/// ConfigError when malformed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Full validation of the data and train sections.
void validate(const RunConfig& config);

}  // namespace gsaudio::cli
