#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

#include "gsaudio/core/adam.hpp"
#include "gsaudio/datagen/dataset.hpp"
#include "gsaudio/train/config.hpp"
#include "gsaudio/train/model.hpp"
#include "gsaudio/train/point_management.hpp"

namespace gsaudio::train {

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kMetricsLogVersion = 1;

/// Adam moments for alpha and for each network tensor (network_parameters() order).
struct OptimizerState {
  core::AdamMoments alpha;
  std::vector<core::AdamMoments> networks;
};

/// Everything needed to continue a run bit-identically.
struct TrainerState {
  TrainConfig config;
  Model model;
  OptimizerState optimizer;
  GradStats stats;
  std::mt19937_64 rng;
  std::size_t iteration = 0;  // completed steps
  std::optional<double> best_metric;
  /// Length and rate of the dataset IRs (rir mode) so a checkpoint can render alone.
  std::size_t rir_length = 0;
  int sample_rate = dsp::kDefaultSampleRate;
};

/// Fresh state: initial points from `points`, networks seeded from config.seed.
TrainerState init_trainer(const TrainConfig& config, scene::AudioPointSet points, const datagen::Dataset& data);

struct StepResult {
  double loss = 0.0;
  double reconstruction = 0.0;
  double volume = 0.0;
};

/// Uniform IR sample indices for one rir-mode step.
std::vector<std::size_t> sample_times(std::size_t length, std::size_t count, std::mt19937_64& rng);

/// Forward, backward and one Adam step on alpha, F and B. Updates GradStats
/// for the points that entered the graph. Throws NumericError naming the
/// example id when the loss is not finite (the state is left untouched).
StepResult train_step(TrainerState& state, const TrainingExample& example, std::span<const std::size_t> times = {});

struct ScheduleEvent {
  std::size_t iteration = 0;
  std::size_t pruned = 0;
  std::size_t added = 0;
};

struct TrainResult {
  std::vector<double> losses;               // per step run by this call
  std::vector<std::size_t> point_counts;    // points seen by each of those steps
  std::vector<ScheduleEvent> events;
  std::vector<nlohmann::json> evaluations;  // the metrics-log records written
  std::filesystem::path best_checkpoint;
  std::filesystem::path final_checkpoint;
};

/// Validation record for the current model: MAG/ENV in binaural mode,
/// T60/C50/EDT errors in rir mode.
nlohmann::json evaluate(const TrainerState& state, const datagen::Dataset& data, std::span<const std::size_t> split);

/// Runs steps state.iteration+1 .. config.iterations. Each iteration prunes
/// (every prune_interval), then densifies (every densify_interval), then
/// steps on a random training sample. Every eval_interval (and at iteration 0
/// of a fresh run) one record is appended to out/metrics.jsonl; the best
/// validation model goes to out/best and the end state to out/final. On a
/// non-finite loss out/diagnostic.json is written and NumericError rethrown.
TrainResult run_training(TrainerState& state, const datagen::Dataset& data, const std::filesystem::path& out);

/// Checkpoint directory: points.ply, field.bin, binauralizer.bin, config.json
/// and optimizer.bin.
void save_checkpoint(const TrainerState& state, const std::filesystem::path& dir,
                     const nlohmann::json& metrics = nullptr);
TrainerState load_checkpoint(const std::filesystem::path& dir);

}  // namespace gsaudio::train
