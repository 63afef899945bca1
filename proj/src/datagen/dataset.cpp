#include "gsaudio/datagen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "gsaudio/core/parallel.hpp"
#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/dsp/wav.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::datagen {
namespace {

using nlohmann::json;

std::string padded(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", id);
  return buf;
}

json vec_json(const scene::Vec3& v) { return json::array({v[0], v[1], v[2]}); }

scene::Vec3 vec_from(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(field, std::string("expected a 3-vector for '") + field + "'");
  return {{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}};
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw SchemaError(name, std::string("manifest lacks '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(name, std::string("manifest field '") + name + "': " + e.what());
  }
}

double head_margin() { return kHeadRadius + 0.01; }

}  // namespace

void validate(const DatasetConfig& c) {
  validate(c.room);
  if (c.samples < 5) throw ConfigError("a dataset needs at least 5 samples, got " + std::to_string(c.samples));
  if (c.max_order < 0) throw ConfigError("max_order must be non-negative");
  if (!(c.duration_sec > 0.0) || !(c.rir_duration_sec > 0.0)) throw ConfigError("durations must be positive");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (!(c.min_source_distance >= 0.0)) throw ConfigError("min_source_distance must be non-negative");
  for (int a = 0; a < 3; ++a)
    if (c.room.dimensions[a] <= 2.0 * head_margin())
      throw GeometryError("room is too small to hold a listener head");
  if (!inside(c.room, c.source)) throw GeometryError("source position is not strictly inside the room");
}

json Manifest::to_json() const {
  const auto& c = config;
  json samples_json = json::array();
  for (const auto& s : samples) {
    json rec{{"id", s.id},
             {"split", s.split},
             {"listener", {{"position", vec_json(s.listener.position)}, {"yaw", s.listener.yaw.value_or(0.0)}}},
             {"mono", s.mono},
             {"binaural", s.binaural}};
    if (!s.rir_left.empty()) {
      rec["rir_left"] = s.rir_left;
      rec["rir_right"] = s.rir_right;
    }
    samples_json.push_back(std::move(rec));
  }
  return json{{"schema_version", schema_version},
              {"mode", to_string(c.mode)},
              {"seed", c.seed},
              {"signal", to_string(c.signal)},
              {"sample_rate", c.room.sample_rate},
              {"duration_sec", c.duration_sec},
              {"rir_duration_sec", c.rir_duration_sec},
              {"min_source_distance", c.min_source_distance},
              {"train_fraction", c.train_fraction},
              {"room",
               {{"dimensions", vec_json(c.room.dimensions)},
                {"absorption", c.room.absorption},
                {"speed_of_sound", c.room.speed_of_sound},
                {"max_order", c.max_order}}},
              {"source", vec_json(c.source)},
              {"samples", samples_json}};
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  m.schema_version = field<int>(j, "schema_version");
  if (m.schema_version > kManifestVersion)
    throw SchemaError("schema_version", "manifest version " + std::to_string(m.schema_version) + " is newer than supported");
  auto& c = m.config;
  c.mode = parse_mode(field<std::string>(j, "mode"));
  c.seed = field<std::uint64_t>(j, "seed");
  c.signal = parse_signal_kind(field<std::string>(j, "signal"));
  c.room.sample_rate = field<int>(j, "sample_rate");
  c.duration_sec = field<double>(j, "duration_sec");
  c.rir_duration_sec = field<double>(j, "rir_duration_sec");
  c.min_source_distance = field<double>(j, "min_source_distance");
  c.train_fraction = field<double>(j, "train_fraction");
  const json room = field<json>(j, "room");
  c.room.dimensions = vec_from(field<json>(room, "dimensions"), "dimensions");
  c.room.absorption = field<std::array<double, 6>>(room, "absorption");
  c.room.speed_of_sound = field<double>(room, "speed_of_sound");
  c.max_order = field<int>(room, "max_order");
  c.source = vec_from(field<json>(j, "source"), "source");
  for (const auto& r : field<json>(j, "samples")) {
    SampleRecord s;
    s.id = field<std::size_t>(r, "id");
    s.split = field<std::string>(r, "split");
    if (s.split != "train" && s.split != "val") throw SchemaError("split", "unknown split '" + s.split + "'");
    const json listener = field<json>(r, "listener");
    s.listener = scene::Pose::from_yaw(vec_from(field<json>(listener, "position"), "position"),
                                       field<double>(listener, "yaw"));
    s.mono = field<std::string>(r, "mono");
    s.binaural = field<std::string>(r, "binaural");
    if (c.mode == Mode::rir) {
      s.rir_left = field<std::string>(r, "rir_left");
      s.rir_right = field<std::string>(r, "rir_right");
    }
    m.samples.push_back(std::move(s));
  }
  c.samples = m.samples.size();
  return m;
}

Manifest plan_dataset(const DatasetConfig& config) {
  validate(config);
  Manifest m;
  m.config = config;
  std::mt19937_64 rng(config.seed);
  const double margin = head_margin();
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  for (std::size_t id = 0; id < config.samples; ++id) {
    scene::Vec3 p;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000) throw GeometryError("cannot place a listener away from the source; room too small");
      for (int a = 0; a < 3; ++a)
        p[a] = std::uniform_real_distribution<double>(margin, config.room.dimensions[a] - margin)(rng);
      if (scene::norm(p - config.source) >= config.min_source_distance && inside(config.room, p, margin)) break;
    }
    SampleRecord s;
    s.id = id;
    s.listener = scene::Pose::from_yaw(p, yaw(rng));
    s.mono = "mono/" + padded(id) + ".wav";
    s.binaural = "binaural/" + padded(id) + ".wav";
    if (config.mode == Mode::rir) {
      s.rir_left = "rir/" + padded(id) + "_l.wav";
      s.rir_right = "rir/" + padded(id) + "_r.wav";
    }
    m.samples.push_back(std::move(s));
  }
  // Seeded shuffle, first train_fraction of the permutation trains.
  std::vector<std::size_t> order(config.samples);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(config.samples)));
  for (std::size_t i = 0; i < order.size(); ++i) m.samples[order[i]].split = i < n_train ? "train" : "val";
  return m;
}

Manifest synth_dataset(const DatasetConfig& config, const std::filesystem::path& dir) {
  Manifest m = plan_dataset(config);
  std::error_code ec;
  for (const char* sub : {"mono", "binaural", "rir"}) {
    if (std::string(sub) == "rir" && config.mode != Mode::rir) continue;
    std::filesystem::create_directories(dir / sub, ec);
    if (ec) throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  const auto length = static_cast<std::size_t>(std::llround(config.duration_sec * config.room.sample_rate));
  const auto rir_length = static_cast<std::size_t>(std::llround(config.rir_duration_sec * config.room.sample_rate));

  // Per-sample streams derived from the dataset seed keep rendering order free.
  std::vector<std::uint64_t> signal_seeds(m.samples.size());
  std::seed_seq seq{config.seed, std::uint64_t{0x5157A1}};
  std::vector<std::uint32_t> words(2 * m.samples.size());
  seq.generate(words.begin(), words.end());
  for (std::size_t i = 0; i < signal_seeds.size(); ++i)
    signal_seeds[i] = (std::uint64_t{words[2 * i]} << 32) | words[2 * i + 1];

  core::parallel_for(m.samples.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = m.samples[i];
      std::mt19937_64 rng(signal_seeds[i]);
      const dsp::Waveform mono = make_signal(config.signal, length, config.room.sample_rate, rng);
      dsp::write_mono(dir / s.mono, mono);
      dsp::write_stereo(dir / s.binaural, binaural_render(config.room, config.source, s.listener, mono, config.max_order));
      if (config.mode == Mode::rir) {
        const auto ir = ear_impulse_responses(config.room, config.source, s.listener, config.max_order, rir_length);
        dsp::write_mono(dir / s.rir_left, dsp::Waveform{ir.left.samples, ir.left.sample_rate});
        dsp::write_mono(dir / s.rir_right, dsp::Waveform{ir.right.samples, ir.right.sample_rate});
      }
    }
  });
  core::write_file_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

std::vector<std::size_t> Dataset::split(const std::string& name) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].record.split == name) out.push_back(i);
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  d.dir = dir;
  json j;
  try {
    j = json::parse(core::read_file(dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw SchemaError("manifest", (dir / "manifest.json").string() + ": " + e.what());
  }
  d.manifest = Manifest::from_json(j);
  d.samples.resize(d.manifest.samples.size());
  core::parallel_for(d.samples.size(), 4, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Sample& s = d.samples[i];
      s.record = d.manifest.samples[i];
      s.mono = dsp::read_mono(dir / s.record.mono);
      s.binaural = dsp::read_stereo(dir / s.record.binaural);
      if (d.mode() == Mode::rir) {
        const auto l = dsp::read_mono(dir / s.record.rir_left);
        const auto r = dsp::read_mono(dir / s.record.rir_right);
        s.rir = dsp::BinauralIr{{l.samples, l.sample_rate}, {r.samples, r.sample_rate}};
      }
    }
  });
  if (d.samples.empty()) throw ConfigError("dataset " + dir.string() + " has no samples");
  return d;
}

scene::GaussianCloud synthesize_room_cloud(const ShoeboxRoom& room, std::size_t points, std::uint64_t seed) {
  validate(room);
  if (points == 0) throw ConfigError("synthetic cloud needs at least one point");
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n;
  scene::GaussianCloud c;
  c.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    for (int a = 0; a < 3; ++a) {
      const double x = std::uniform_real_distribution<double>(0.0, room.dimensions[a])(rng);
      c.positions[3 * i + a] = static_cast<float>(x);
    }
    float q[4], norm2 = 0.0f;
    do {
      norm2 = 0.0f;
      for (float& v : q) {
        v = n(rng);
        norm2 += v * v;
      }
    } while (norm2 < 1e-6f);
    for (int k = 0; k < 4; ++k) c.rotations[4 * i + k] = q[k] / std::sqrt(norm2);
    for (int a = 0; a < 3; ++a) c.scales[3 * i + a] = -4.0f + 0.3f * n(rng);
    c.opacities[i] = n(rng);
    for (std::size_t k = 0; k < scene::kShWidth; ++k) c.sh[scene::kShWidth * i + k] = 0.3f * n(rng);
  }
  return c;
}

}  // namespace gsaudio::datagen
