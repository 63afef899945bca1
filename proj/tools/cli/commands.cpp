#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <spdlog/spdlog.h>

#include "gsaudio/binaural/binauralizer.hpp"
#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/datagen/signals.hpp"
#include "gsaudio/dsp/wav.hpp"
#include "gsaudio/error.hpp"
#include "gsaudio/field/acoustic_field.hpp"
#include "gsaudio/train/baselines.hpp"

namespace gsaudio::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) { core::write_file_atomic(path, j.dump(2) + "\n"); }

json scores_json(const train::BinauralScores& s) { return {{"mag", s.mag}, {"env", s.env}}; }

double channel_rms(const std::vector<double>& x) { return x.empty() ? 0.0 : dsp::rms(x); }

bool inside(const binaural::SceneBounds& b, const scene::Vec3& p) {
  for (int k = 0; k < 3; ++k)
    if (p[k] < b.lo[k] || p[k] > b.hi[k]) return false;
  return true;
}

train::TrainerState load_state(const fs::path& checkpoint) {
  if (!fs::exists(checkpoint / "config.json")) throw IoError("no checkpoint at " + checkpoint.string());
  return train::load_checkpoint(checkpoint);
}

datagen::Dataset load_matching(const RunConfig& config) {
  datagen::Dataset data = datagen::load_dataset(config.dataset);
  if (data.mode() != config.mode)
    throw ConfigError("dataset " + config.dataset.string() + " is " + to_string(data.mode()) + " but the run is " +
                      to_string(config.mode));
  return data;
}

struct AblationSetting {
  std::string label;
  json row;
  RunConfig config;
};

// Settings in the row order the study is usually reported in.
std::vector<AblationSetting> ablation_settings(const RunConfig& base, const std::string& axis) {
  std::vector<AblationSetting> out;
  if (axis == "vicinity") {
    for (int p : {5, 10, 15, 20, 25}) {
      RunConfig c = base;
      c.train.vicinity_percentile = p;
      out.push_back({"p" + std::to_string(p), {{"percentile", p}}, c});
    }
  } else if (axis == "alpha_init") {
    using A = scene::Attribute;
    const std::vector<scene::AttributeSet> sets{
        {A::O},          {A::S},          {A::R},         {A::SH},
        {A::S, A::O},    {A::SH, A::O},   {A::S, A::SH},  {A::SH, A::R},
        {A::S, A::SH, A::O}, {A::SH, A::R, A::O}, {A::S, A::SH, A::R, A::O}};
    for (const auto& set : sets) {
      RunConfig c = base;
      c.train.attributes = set;
      std::string label = set.to_string();
      std::replace(label.begin(), label.end(), ',', '_');
      out.push_back({label, {{"parameters", set.to_string()}, {"dimension", set.width()}}, c});
    }
  } else {
    throw ConfigError("unknown ablation axis '" + axis + "' (expected vicinity or alpha_init)");
  }
  return out;
}

std::string csv_of(const json& report) {
  std::ostringstream os;
  const auto& columns = report.at("columns");
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i].get<std::string>();
  os << "\n";
  for (const auto& row : report.at("rows")) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const json& v = row.at(columns[i].get<std::string>());
      os << (i ? "," : "");
      if (v.is_string()) {
        os << '"' << v.get<std::string>() << '"';
      } else {
        os << v.dump();
      }
    }
    os << "\n";
  }
  return os.str();
}

double percentile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

json gen_data(const RunConfig& config) {
  datagen::validate(config.data);
  ensure_directory(config.out);
  const auto manifest = datagen::synth_dataset(config.data, config.out);
  std::size_t n_train = 0;
  for (const auto& s : manifest.samples) n_train += s.split == "train" ? 1 : 0;
  return {{"schema_version", kReportVersion},
          {"command", "gen-data"},
          {"dir", config.out.string()},
          {"mode", to_string(config.mode)},
          {"seed", config.seed},
          {"samples", manifest.samples.size()},
          {"train", n_train},
          {"val", manifest.samples.size() - n_train}};
}

scene::AudioPointSet initial_points(const RunConfig& config, const datagen::Dataset& data) {
  const auto cloud = config.scene ? scene::load_point_cloud(*config.scene)
                                  : datagen::synthesize_room_cloud(data.manifest.config.room, config.scene_points,
                                                                   config.seed);
  return scene::init_audio_points(cloud, config.train.attributes);
}

json train(const RunConfig& config, const std::optional<fs::path>& resume) {
  train::validate(config.train);
  const datagen::Dataset data = load_matching(config);
  ensure_directory(config.out);
  train::TrainerState state;
  if (resume) {
    state = load_state(*resume);
    if (state.config.mode != config.mode) throw ConfigError("checkpoint mode differs from the run mode");
    state.config.iterations = config.train.iterations;
  } else {
    state = train::init_trainer(config.train, initial_points(config, data), data);
  }
  write_json(config.out / "run_config.json", to_json(config));
  const auto result = train::run_training(state, data, config.out);
  json report{{"schema_version", kReportVersion},
              {"command", "train"},
              {"mode", to_string(config.mode)},
              {"iterations", state.iteration},
              {"points", state.model.points.size()},
              {"metrics_log", (config.out / "metrics.jsonl").string()},
              {"best_checkpoint", result.best_checkpoint.string()},
              {"final_checkpoint", result.final_checkpoint.string()}};
  report["last_eval"] = result.evaluations.empty() ? json(nullptr) : result.evaluations.back();
  return report;
}

json render(const RenderRequest& request) {
  const auto state = load_state(request.checkpoint);
  scene::validate(request.pose);
  const auto& model = state.model;
  if (!inside(model.binauralizer.bounds, request.pose.position))
    spdlog::warn("listener position is outside the scene bounds; rendering anyway");
  json report{{"schema_version", kReportVersion},
              {"command", "render"},
              {"mode", to_string(model.mode())},
              {"output", request.output.string()}};
  if (model.mode() == Mode::binaural) {
    const dsp::Waveform mono = dsp::read_mono(request.input);
    const auto audio = train::render(model, request.pose, mono);
    dsp::write_stereo(request.output, audio);
    report["left_rms"] = channel_rms(audio.left.samples);
    report["right_rms"] = channel_rms(audio.right.samples);
  } else {
    const auto ir = train::render_rir(model, request.pose, state.rir_length, state.sample_rate);
    dsp::write_wav(request.output, {state.sample_rate, {ir.left.samples, ir.right.samples}});
    report["left_rms"] = channel_rms(ir.left.samples);
    report["right_rms"] = channel_rms(ir.right.samples);
  }
  return report;
}

json evaluate(const fs::path& checkpoint, const fs::path& dataset, const std::string& split) {
  if (split != "train" && split != "val") throw ConfigError("split must be train or val, got '" + split + "'");
  const auto state = load_state(checkpoint);
  const auto data = datagen::load_dataset(dataset);
  if (data.mode() != state.model.mode())
    throw ConfigError("checkpoint is " + to_string(state.model.mode()) + " but dataset is " + to_string(data.mode()));
  const auto indices = data.split(split);
  json report{{"schema_version", kReportVersion},
              {"command", "eval"},
              {"mode", to_string(data.mode())},
              {"split", split},
              {"samples", indices.size()},
              {"iteration", state.iteration}};
  if (data.mode() == Mode::binaural) {
    const auto s = train::evaluate_binaural(state.model, data, indices);
    const auto b = train::codec_baselines(data, indices);
    report["mag"] = s.mag;
    report["env"] = s.env;
    report["baselines"] = {{"mono_mono", scores_json(b.mono_mono)},
                           {"mono_energy", scores_json(b.mono_energy)},
                           {"stereo_energy", scores_json(b.stereo_energy)}};
  } else {
    const auto s = train::evaluate_rir(state.model, data, indices);
    report["t60_error_percent"] = s.t60_error_percent;
    report["c50_error_db"] = s.c50_error_db;
    report["edt_error_sec"] = s.edt_error_sec;
    report["undefined_predictions"] = s.undefined;
  }
  return report;
}

json ablate(const RunConfig& config, const std::string& axis) {
  const auto settings = ablation_settings(config, axis);
  if (config.mode != Mode::binaural) throw ConfigError("ablations report MAG/ENV and need binaural mode");
  train::validate(config.train);
  const datagen::Dataset data = load_matching(config);
  const auto val = data.split("val");
  const fs::path root = config.out / ("ablate_" + axis);
  ensure_directory(root);

  json rows = json::array();
  for (const auto& s : settings) {
    auto state = train::init_trainer(s.config.train, initial_points(s.config, data), data);
    train::run_training(state, data, root / s.label);
    const auto scores = train::evaluate_binaural(state.model, data, val);
    json row = s.row;
    row["mag"] = scores.mag;
    row["env"] = scores.env;
    row["points"] = state.model.points.size();
    spdlog::info("ablation {} {}: {}", axis, s.label, row.dump());
    rows.push_back(std::move(row));
  }
  json columns = axis == "vicinity" ? json{"percentile", "mag", "env"} : json{"parameters", "dimension", "mag", "env"};
  json report{{"schema_version", kReportVersion},
              {"command", "ablate"},
              {"axis", axis},
              {"iterations", config.train.iterations},
              {"split", "val"},
              {"columns", columns},
              {"rows", rows}};
  write_json(config.out / ("ablation_" + axis + ".json"), report);
  core::write_file_atomic(config.out / ("ablation_" + axis + ".csv"), csv_of(report));
  return report;
}

std::string format_ablation(const json& report) {
  const bool vicinity = report.at("axis") == "vicinity";
  std::ostringstream os;
  os << (vicinity ? "Percentile" : "Parameters          | Dimension") << " | MAG      | ENV\n";
  for (const auto& row : report.at("rows")) {
    char line[160];
    if (vicinity) {
      std::snprintf(line, sizeof line, "%-10d | %8.3f | %.3f\n", row.at("percentile").get<int>(),
                    row.at("mag").get<double>(), row.at("env").get<double>());
    } else {
      std::snprintf(line, sizeof line, "%-19s | %-9zu | %8.3f | %.3f\n",
                    row.at("parameters").get<std::string>().c_str(), row.at("dimension").get<std::size_t>(),
                    row.at("mag").get<double>(), row.at("env").get<double>());
    }
    os << line;
  }
  return os.str();
}

json bench(const fs::path& checkpoint, std::size_t renders) {
  if (renders < 10) throw ConfigError("bench needs at least 10 renders");
  const auto state = load_state(checkpoint);
  const auto& model = state.model;
  if (model.mode() != Mode::binaural) throw ConfigError("bench times binaural renders and needs a binaural checkpoint");
  const auto& b = model.binauralizer.bounds;
  const scene::Pose pose = scene::Pose::from_yaw(
      {{(b.lo[0] + b.hi[0]) / 2, (b.lo[1] + b.hi[1]) / 2, (b.lo[2] + b.hi[2]) / 2}}, 0.0);
  std::mt19937_64 rng(0);
  const int rate = state.sample_rate;
  const dsp::Waveform mono = datagen::pink_noise_burst(static_cast<std::size_t>(rate), rate, rng);
  const dsp::StftParams params;

  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  std::vector<double> total, context_t, mask_t, synth_t;
  dsp::StereoWaveform first;
  bool identical = true;
  for (std::size_t i = 0; i < renders; ++i) {
    const auto t0 = clock::now();
    const core::Tensor context =
        field::pooled_context(model.field, model.points, pose, model.source, model.vicinity_percentile);
    const auto t1 = clock::now();
    const auto masks = binaural::query_masks(model.binauralizer, pose, context, params.bins());
    const auto t2 = clock::now();
    auto audio = binaural::binauralize(mono, masks, params).audio;
    const auto t3 = clock::now();
    context_t.push_back(seconds(t1 - t0));
    mask_t.push_back(seconds(t2 - t1));
    synth_t.push_back(seconds(t3 - t2));
    total.push_back(seconds(t3 - t0));
    if (i == 0) {
      first = std::move(audio);
    } else {
      identical = identical && audio.left.samples == first.left.samples && audio.right.samples == first.right.samples;
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  return {{"schema_version", kReportVersion},
          {"command", "bench"},
          {"renders", renders},
          {"render_seconds", 1.0},
          {"points", model.points.size()},
          {"latencies_sec", total},
          {"mean_sec", mean(total)},
          {"median_sec", percentile_of(total, 0.5)},
          {"p95_sec", percentile_of(total, 0.95)},
          {"breakdown_mean_sec",
           {{"context", mean(context_t)}, {"mask_query", mean(mask_t)}, {"stft_mask_istft", mean(synth_t)}}},
          {"identical_audio", identical}};
}

}  // namespace gsaudio::cli
