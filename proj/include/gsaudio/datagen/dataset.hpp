#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsaudio/datagen/room.hpp"
#include "gsaudio/datagen/signals.hpp"
#include "gsaudio/mode.hpp"
#include "gsaudio/scene/gaussian_cloud.hpp"

namespace gsaudio::datagen {

inline constexpr int kManifestVersion = 1;

struct DatasetConfig {
  ShoeboxRoom room;
  int max_order = 3;
  std::size_t samples = 100;
  SignalKind signal = SignalKind::pink_noise;
  Mode mode = Mode::binaural;
  std::uint64_t seed = 0;
  double duration_sec = 1.0;
  double rir_duration_sec = 0.5;
  scene::Vec3 source{{1.5, 2.0, 1.5}};
  /// Listeners closer than this to the source are resampled.
  double min_source_distance = 0.5;
  double train_fraction = 0.8;
};

/// Throws ConfigError (fewer than 5 samples, bad fractions) or GeometryError
/// (source outside the room, room too small for the head).
void validate(const DatasetConfig& config);

struct SampleRecord {
  std::size_t id = 0;
  std::string split;  // "train" or "val"
  scene::Pose listener;
  std::string mono;
  std::string binaural;
  std::string rir_left;   // rir mode only
  std::string rir_right;  // rir mode only
};

struct Manifest {
  int schema_version = kManifestVersion;
  DatasetConfig config;
  std::vector<SampleRecord> samples;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);  // throws SchemaError
};

/// Listener poses and split labels for a config (no audio rendering).
Manifest plan_dataset(const DatasetConfig& config);

/// Renders every sample and writes manifest.json, mono/NNN.wav,
/// binaural/NNN.wav and, in rir mode, rir/NNN_l.wav and rir/NNN_r.wav.
/// Output is byte-identical for a given config regardless of thread count.
Manifest synth_dataset(const DatasetConfig& config, const std::filesystem::path& dir);

struct Sample {
  SampleRecord record;
  dsp::Waveform mono;
  dsp::StereoWaveform binaural;
  std::optional<dsp::BinauralIr> rir;
};

struct Dataset {
  std::filesystem::path dir;
  Manifest manifest;
  std::vector<Sample> samples;

  const scene::Vec3& source() const { return manifest.config.source; }
  Mode mode() const { return manifest.config.mode; }
  /// Indices into samples with the given split label.
  std::vector<std::size_t> split(const std::string& name) const;
};

/// Throws IoError for missing files and SchemaError for malformed manifests.
Dataset load_dataset(const std::filesystem::path& dir);

/// Splat-style cloud with points uniform in the room volume and random
/// attributes, standing in for a pretrained reconstruction.
scene::GaussianCloud synthesize_room_cloud(const ShoeboxRoom& room, std::size_t points, std::uint64_t seed);

}  // namespace gsaudio::datagen
