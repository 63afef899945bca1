#pragma once

#include <cstddef>
#include <cstdint>

#include "json.hpp"

#include "gsaudio/mode.hpp"
#include "gsaudio/scene/audio_points.hpp"
#include "gsaudio/scene/queries.hpp"

namespace gsaudio::train {

/// Stage-2 optimization settings. Intervals of 0 disable the schedule.
struct TrainConfig {
  Mode mode = Mode::binaural;
  double lambda_a = 0.01;
  double lr_alpha = 1.6e-4;
  double lr_field = 5e-4;
  double lr_binauralizer = 5e-4;
  std::size_t iterations = 2000;
  std::size_t densify_interval = 500;
  double densify_threshold = 0.0004;
  std::size_t prune_interval = 3000;
  std::size_t prune_min_neighbors = 8;
  double prune_radius = 0.1;
  double vicinity_percentile = scene::kDefaultVicinityPercentile;
  std::size_t eval_interval = 250;
  std::uint64_t seed = 0;
  scene::AttributeSet attributes = scene::AttributeSet::defaults();
  /// Mask network width; 0 picks the mode default.
  std::size_t mask_width = 0;
  /// Time indices drawn per step in rir mode.
  std::size_t rir_time_samples = 256;

  std::size_t resolved_mask_width() const;
};

/// Throws ConfigError naming the offending field.
void validate(const TrainConfig& config);

nlohmann::json to_json(const TrainConfig& config);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace gsaudio::train
