#pragma once

// Shared fixtures for the training tests and the acceptance runner.

#include <cstdint>
#include <filesystem>

#include "gsaudio/datagen/dataset.hpp"
#include "gsaudio/train/trainer.hpp"

namespace gsaudio::testing {

/// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

/// Small dataset (10 samples of 0.1 s) synthesized once per process per mode.
const datagen::Dataset& tiny_dataset(Mode mode);

/// Narrow networks and short schedules for fast runs on tiny_dataset().
train::TrainConfig tiny_config(Mode mode);

/// Audio points from a synthetic cloud in the dataset's room.
scene::AudioPointSet room_points(const datagen::Dataset& data, std::size_t count, std::uint64_t seed,
                                 scene::AttributeSet attributes = scene::AttributeSet::defaults());

struct GradcheckReport {
  double alpha_error = 0.0;
  double weight_error = 0.0;
  std::size_t alpha_checked = 0;
  std::size_t weight_checked = 0;
};

/// Finite-difference check of the total stage-2 loss with respect to `count`
/// random alpha entries (drawn from the points that enter the graph) and
/// `count` random network weights, on a `points`-point scene.
GradcheckReport whole_graph_gradcheck(Mode mode, std::size_t points, std::size_t count, std::uint64_t seed);

}  // namespace gsaudio::testing
