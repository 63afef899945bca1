#pragma once

// Subcommand bodies. Each returns the JSON report it also prints or writes,
// so the acceptance runner and tests can drive them without a subprocess.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "run_config.hpp"
#include "gsaudio/scene/geometry.hpp"
#include "gsaudio/train/trainer.hpp"

namespace gsaudio::cli {

inline constexpr int kReportVersion = 1;

/// Synthesizes the dataset described by config.data into config.out.
nlohmann::json gen_data(const RunConfig& config);

/// Initial audio points: the splat PLY when config.scene is set, otherwise a
/// synthetic cloud in the dataset's room.
scene::AudioPointSet initial_points(const RunConfig& config, const datagen::Dataset& data);

/// Trains on config.dataset into config.out (metrics.jsonl, best/, final/).
/// With `resume` set, continues from that checkpoint up to
/// config.train.iterations.
nlohmann::json train(const RunConfig& config, const std::optional<std::filesystem::path>& resume = std::nullopt);

struct RenderRequest {
  std::filesystem::path checkpoint;
  scene::Pose pose;
  std::filesystem::path input;   // mono WAV, binaural mode
  std::filesystem::path output;  // 2-channel WAV
};

/// Binaural mode renders the input; rir mode writes the predicted IR pair.
nlohmann::json render(const RenderRequest& request);

/// MAG/ENV plus the codec baselines, or T60/C50/EDT errors in rir mode.
/// Throws ConfigError when checkpoint and dataset modes differ.
nlohmann::json evaluate(const std::filesystem::path& checkpoint, const std::filesystem::path& dataset,
                        const std::string& split);

/// Trains one model per setting of `axis` ("vicinity" or "alpha_init") and
/// collects validation MAG/ENV. Writes ablation_<axis>.json and .csv to
/// config.out.
nlohmann::json ablate(const RunConfig& config, const std::string& axis);

/// Paper-style text rendering of an ablation report.
std::string format_ablation(const nlohmann::json& report);

/// Times `renders` one-second renders at the room centre.
nlohmann::json bench(const std::filesystem::path& checkpoint, std::size_t renders);

}  // namespace gsaudio::cli
