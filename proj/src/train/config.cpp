#include "gsaudio/train/config.hpp"

#include <set>
#include <string>

#include "gsaudio/binaural/mask_network.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::train {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("training config: '") + key + "' has the wrong type");
  }
}

}  // namespace

std::size_t TrainConfig::resolved_mask_width() const {
  return mask_width == 0 ? binaural::default_width(mode) : mask_width;
}

void validate(const TrainConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("training config: ") + what);
  };
  require(c.lambda_a >= 0.0 && c.lambda_a <= 1.0, "lambda_a must lie in [0, 1]");
  require(c.lr_alpha > 0.0 && c.lr_field > 0.0 && c.lr_binauralizer > 0.0, "learning rates must be positive");
  require(c.iterations > 0, "iterations must be positive");
  require(c.densify_threshold > 0.0, "densify_threshold must be positive");
  require(c.prune_radius > 0.0, "prune_radius must be positive");
  require(c.vicinity_percentile > 0.0 && c.vicinity_percentile <= 100.0, "vicinity_percentile must lie in (0, 100]");
  require(c.eval_interval > 0, "eval_interval must be positive");
  require(!c.attributes.empty(), "attributes must select at least one attribute");
  require(c.rir_time_samples > 0, "rir_time_samples must be positive");
}

json to_json(const TrainConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"lambda_a", c.lambda_a},
          {"lr_alpha", c.lr_alpha},
          {"lr_field", c.lr_field},
          {"lr_binauralizer", c.lr_binauralizer},
          {"iterations", c.iterations},
          {"densify_interval", c.densify_interval},
          {"densify_threshold", c.densify_threshold},
          {"prune_interval", c.prune_interval},
          {"prune_min_neighbors", c.prune_min_neighbors},
          {"prune_radius", c.prune_radius},
          {"vicinity_percentile", c.vicinity_percentile},
          {"eval_interval", c.eval_interval},
          {"seed", c.seed},
          {"attributes", c.attributes.to_string()},
          {"mask_width", c.mask_width},
          {"rir_time_samples", c.rir_time_samples}};
}

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  const json defaults = to_json(TrainConfig{});
  std::set<std::string> known;
  for (auto it = defaults.begin(); it != defaults.end(); ++it) known.insert(it.key());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw ConfigError("training config: unknown key '" + it.key() + "'");

  TrainConfig c;
  std::string mode = to_string(c.mode), attributes = c.attributes.to_string();
  read(j, "mode", mode);
  c.mode = parse_mode(mode);
  read(j, "lambda_a", c.lambda_a);
  read(j, "lr_alpha", c.lr_alpha);
  read(j, "lr_field", c.lr_field);
  read(j, "lr_binauralizer", c.lr_binauralizer);
  read(j, "iterations", c.iterations);
  read(j, "densify_interval", c.densify_interval);
  read(j, "densify_threshold", c.densify_threshold);
  read(j, "prune_interval", c.prune_interval);
  read(j, "prune_min_neighbors", c.prune_min_neighbors);
  read(j, "prune_radius", c.prune_radius);
  read(j, "vicinity_percentile", c.vicinity_percentile);
  read(j, "eval_interval", c.eval_interval);
  read(j, "seed", c.seed);
  read(j, "attributes", attributes);
  c.attributes = scene::AttributeSet::parse(attributes);
  read(j, "mask_width", c.mask_width);
  read(j, "rir_time_samples", c.rir_time_samples);
  validate(c);
  return c;
}

}  // namespace gsaudio::train
