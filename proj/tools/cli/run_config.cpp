#include "run_config.hpp"

#include <set>
#include <string>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw ConfigError(section + ": unknown key '" + it.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(section + ": '" + key + "' has the wrong type");
  }
}

void read_vec(const json& j, const char* key, scene::Vec3& out, const std::string& section) {
  if (!j.contains(key)) return;
  std::array<double, 3> v{};
  read(j, key, v, section);
  out = scene::Vec3{v};
}

json vec_json(const scene::Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json data_json(const datagen::DatasetConfig& c) {
  return {{"samples", c.samples},
          {"signal", datagen::to_string(c.signal)},
          {"duration_sec", c.duration_sec},
          {"rir_duration_sec", c.rir_duration_sec},
          {"max_order", c.max_order},
          {"train_fraction", c.train_fraction},
          {"min_source_distance", c.min_source_distance},
          {"source", vec_json(c.source)},
          {"room",
           {{"dimensions", vec_json(c.room.dimensions)},
            {"absorption", c.room.absorption},
            {"speed_of_sound", c.room.speed_of_sound},
            {"sample_rate", c.room.sample_rate}}}};
}

datagen::DatasetConfig data_from_json(const json& j) {
  const std::string section = "data config";
  reject_unknown(j, {"samples", "signal", "duration_sec", "rir_duration_sec", "max_order", "train_fraction",
                     "min_source_distance", "source", "room"},
                 section);
  datagen::DatasetConfig c;
  read(j, "samples", c.samples, section);
  std::string signal = datagen::to_string(c.signal);
  read(j, "signal", signal, section);
  c.signal = datagen::parse_signal_kind(signal);
  read(j, "duration_sec", c.duration_sec, section);
  read(j, "rir_duration_sec", c.rir_duration_sec, section);
  read(j, "max_order", c.max_order, section);
  read(j, "train_fraction", c.train_fraction, section);
  read(j, "min_source_distance", c.min_source_distance, section);
  read_vec(j, "source", c.source, section);
  if (j.contains("room")) {
    const json& room = j.at("room");
    const std::string rs = "data config room";
    reject_unknown(room, {"dimensions", "absorption", "speed_of_sound", "sample_rate"}, rs);
    read_vec(room, "dimensions", c.room.dimensions, rs);
    if (room.contains("absorption") && room.at("absorption").is_number()) {
      c.room.absorption.fill(room.at("absorption").get<double>());
    } else {
      read(room, "absorption", c.room.absorption, rs);
    }
    read(room, "speed_of_sound", c.room.speed_of_sound, rs);
    read(room, "sample_rate", c.room.sample_rate, rs);
  }
  return c;
}

}  // namespace

void RunConfig::propagate() {
  data.mode = mode;
  train.mode = mode;
  data.seed = seed;
  train.seed = seed;
}

RunConfig run_config_from_json(const json& j) {
  const std::string section = "run config";
  reject_unknown(j, {"schema_version", "mode", "seed", "threads", "out", "dataset", "scene", "scene_points", "data",
                     "train"},
                 section);
  RunConfig c;
  int version = kRunConfigVersion;
  read(j, "schema_version", version, section);
  if (version != kRunConfigVersion) throw ConfigError("run config: unsupported schema_version " + std::to_string(version));
  std::string mode = to_string(c.mode);
  read(j, "mode", mode, section);
  c.mode = parse_mode(mode);
  read(j, "seed", c.seed, section);
  read(j, "threads", c.threads, section);
  std::string path;
  if (j.contains("out")) {
    read(j, "out", path, section);
    c.out = path;
  }
  if (j.contains("dataset")) {
    read(j, "dataset", path, section);
    c.dataset = path;
  }
  if (j.contains("scene") && !j.at("scene").is_null()) {
    read(j, "scene", path, section);
    c.scene = path;
  }
  read(j, "scene_points", c.scene_points, section);
  // Mode and seed live at the top level only, so a document cannot disagree with itself.
  for (const char* sub : {"data", "train"}) {
    if (!j.contains(sub)) continue;
    for (const char* key : {"mode", "seed"})
      if (j.at(sub).is_object() && j.at(sub).contains(key))
        throw ConfigError(std::string("run config: set '") + key + "' at the top level, not in '" + sub + "'");
  }
  if (j.contains("data")) c.data = data_from_json(j.at("data"));
  if (j.contains("train")) c.train = train::train_config_from_json(j.at("train"));
  c.propagate();
  return c;
}

json to_json(const RunConfig& c) {
  json train = train::to_json(c.train);
  train.erase("mode");
  train.erase("seed");
  return {{"schema_version", kRunConfigVersion},
          {"mode", to_string(c.mode)},
          {"seed", c.seed},
          {"threads", c.threads},
          {"out", c.out.string()},
          {"dataset", c.dataset.string()},
          {"scene", c.scene ? json(c.scene->string()) : json(nullptr)},
          {"scene_points", c.scene_points},
          {"data", data_json(c.data)},
          {"train", std::move(train)}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = core::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void validate(const RunConfig& c) {
  datagen::validate(c.data);
  train::validate(c.train);
  if (c.scene_points == 0) throw ConfigError("run config: scene_points must be positive");
}

}  // namespace gsaudio::cli
