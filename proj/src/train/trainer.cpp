#include "gsaudio/train/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"
#include "gsaudio/scene/queries.hpp"

namespace gsaudio::train {
namespace {

using nlohmann::json;

std::string rng_text(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

std::mt19937_64 rng_from(const std::string& text) {
  std::istringstream is(text);
  std::mt19937_64 rng;
  is >> rng;
  if (!is) throw SchemaError("rng", "checkpoint RNG state is malformed");
  return rng;
}

std::mt19937_64 training_rng(std::uint64_t seed) {
  std::seed_seq seq{seed, std::uint64_t{0x7452}};
  return std::mt19937_64(seq);
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& removed) {
  std::vector<std::size_t> kept;
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    kept.push_back(i);
  }
  return kept;
}

// Lower is better: validation MAG, or T60 error in rir mode.
double selection_metric(const json& record, Mode mode) {
  return mode == Mode::binaural ? record.at("mag").get<double>() : record.at("t60_error_percent").get<double>();
}

void append_line(const std::filesystem::path& path, const json& record) {
  std::ofstream os(path, std::ios::app | std::ios::binary);
  if (!os) throw IoError("cannot append to " + path.string());
  os << record.dump() << '\n';
  if (!os) throw IoError("write failed on " + path.string());
}

void add_moments(std::vector<std::pair<std::string, const core::Tensor*>>& out, json& steps, const std::string& name,
                 const core::AdamMoments& m) {
  steps[name] = m.step;
  if (m.first.empty()) return;
  out.push_back({name + ".m", &m.first});
  out.push_back({name + ".v", &m.second});
}

core::AdamMoments read_moments(const core::WeightsFile& file, const std::string& name) {
  core::AdamMoments m;
  m.step = file.header.at("steps").at(name).get<std::uint64_t>();
  for (const auto& t : file.tensors) {
    if (t.name == name + ".m") m.first = t.value;
    if (t.name == name + ".v") m.second = t.value;
  }
  return m;
}

}  // namespace

TrainerState init_trainer(const TrainConfig& config, scene::AudioPointSet points, const datagen::Dataset& data) {
  validate(config);
  if (data.samples.empty()) throw ConfigError("training needs a non-empty dataset");
  if (data.mode() != config.mode)
    throw ConfigError("dataset mode " + to_string(data.mode()) + " does not match training mode " +
                      to_string(config.mode));
  TrainerState s;
  s.config = config;
  s.model = init_model(config, std::move(points), room_bounds(data.manifest.config.room), data.source(), config.seed);
  s.optimizer.networks.resize(s.model.network_parameters().size());
  s.stats = GradStats(s.model.points.size());
  s.rng = training_rng(config.seed);
  s.sample_rate = data.manifest.config.room.sample_rate;
  if (const auto& first = data.samples.front(); first.rir) s.rir_length = first.rir->left.samples.size();
  return s;
}

std::vector<std::size_t> sample_times(std::size_t length, std::size_t count, std::mt19937_64& rng) {
  if (length == 0) throw ContractViolation("sample_times: empty impulse response");
  std::uniform_int_distribution<std::size_t> pick(0, length - 1);
  std::vector<std::size_t> out(count);
  for (auto& t : out) t = pick(rng);
  return out;
}

StepResult train_step(TrainerState& state, const TrainingExample& example, std::span<const std::size_t> times) {
  core::Tape tape;
  std::optional<LossGraph> graph;
  try {
    graph = build_loss(state.model, example, state.config.lambda_a, tape, times);
  } catch (const NumericError& e) {
    throw NumericError("non-finite value on sample " + std::to_string(example.id) + ": " + e.what());
  }
  const LossGraph& g = *graph;
  StepResult r{g.total.value().item(), g.reconstruction.value().item(), g.volume.value().item()};
  if (!std::isfinite(r.loss))
    throw NumericError("non-finite loss on sample " + std::to_string(example.id) + " (reconstruction " +
                       std::to_string(r.reconstruction) + ", volume " + std::to_string(r.volume) + ")");

  auto grads = tape.backward(g.total);
  auto& alpha_grad = grads.at(kAlphaId);
  state.stats.accumulate(alpha_grad, g.active);

  const core::AdamHyper alpha_hyper{.learning_rate = state.config.lr_alpha};
  core::adam_step(state.model.points.alpha, alpha_grad, state.optimizer.alpha, alpha_hyper);

  const auto params = state.model.network_parameters();
  const std::size_t field_count = state.model.field.parameters().size();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto it = grads.find(core::ParamId{static_cast<std::uint32_t>(i + 1)});
    if (it == grads.end()) continue;
    const core::AdamHyper hyper{.learning_rate =
                                    i < field_count ? state.config.lr_field : state.config.lr_binauralizer};
    core::adam_step(*params[i], it->second, state.optimizer.networks[i], hyper);
  }
  return r;
}

json evaluate(const TrainerState& state, const datagen::Dataset& data, std::span<const std::size_t> split) {
  json record{{"iteration", state.iteration}, {"split", "val"}, {"points", state.model.points.size()}};
  if (state.config.mode == Mode::binaural) {
    const auto s = evaluate_binaural(state.model, data, split);
    record["mag"] = s.mag;
    record["env"] = s.env;
  } else {
    const auto s = evaluate_rir(state.model, data, split);
    record["t60_error_percent"] = s.t60_error_percent;
    record["c50_error_db"] = s.c50_error_db;
    record["edt_error_sec"] = s.edt_error_sec;
    record["undefined_predictions"] = s.undefined;
  }
  return record;
}

TrainResult run_training(TrainerState& state, const datagen::Dataset& data, const std::filesystem::path& out) {
  const TrainConfig& cfg = state.config;
  validate(cfg);
  const auto train_split = data.split("train");
  const auto val_split = data.split("val");
  if (train_split.empty() || val_split.empty())
    throw ConfigError("training needs non-empty train and val splits");
  std::filesystem::create_directories(out);

  TrainResult result;
  result.best_checkpoint = out / "best";
  result.final_checkpoint = out / "final";
  const auto log_path = out / "metrics.jsonl";

  double window_sum = 0.0;
  std::size_t window_count = 0;
  auto log_eval = [&] {
    json record = evaluate(state, data, val_split);
    record["schema_version"] = kMetricsLogVersion;
    record["loss"] = window_count == 0 ? json(nullptr) : json(window_sum / static_cast<double>(window_count));
    window_sum = 0.0;
    window_count = 0;
    append_line(log_path, record);
    result.evaluations.push_back(record);
    spdlog::info("iteration {}: {}", state.iteration, record.dump());
    const double metric = selection_metric(record, cfg.mode);
    if (!state.best_metric || metric < *state.best_metric) {
      state.best_metric = metric;
      save_checkpoint(state, result.best_checkpoint, record);
    }
    return record;
  };

  json last_record = nullptr;
  if (state.iteration == 0) {
    std::ofstream(log_path, std::ios::trunc | std::ios::binary);
    last_record = log_eval();
  }

  for (std::size_t it = state.iteration + 1; it <= cfg.iterations; ++it) {
    ScheduleEvent event{it, 0, 0};
    if (cfg.prune_interval > 0 && it % cfg.prune_interval == 0) {
      auto pr = scene::prune_outliers(state.model.points, cfg.prune_min_neighbors, cfg.prune_radius);
      if (!pr.removed.empty()) {
        const auto kept = complement(state.model.points.size(), pr.removed);
        state.model.points = std::move(pr.retained);
        core::select_moment_rows(state.optimizer.alpha, kept);
        state.stats.select(kept);
        event.pruned = pr.removed.size();
      }
    }
    if (cfg.densify_interval > 0 && it % cfg.densify_interval == 0) {
      auto dr = densify(state.model.points, state.stats, cfg.densify_threshold, state.rng);
      core::append_moment_rows(state.optimizer.alpha, dr.added, state.model.points.alpha_width());
      state.model.points = std::move(dr.points);
      event.added = dr.added;
    }
    if (event.pruned > 0 || event.added > 0) {
      result.events.push_back(event);
      spdlog::debug("iteration {}: pruned {}, added {}", it, event.pruned, event.added);
    }

    std::uniform_int_distribution<std::size_t> pick(0, train_split.size() - 1);
    const auto& sample = data.samples.at(train_split[pick(state.rng)]);
    const TrainingExample example = make_example(sample, cfg.mode);
    std::vector<std::size_t> times;
    if (cfg.mode == Mode::rir) times = sample_times(example.rir_target.rows(), cfg.rir_time_samples, state.rng);

    StepResult step;
    try {
      step = train_step(state, example, times);
    } catch (const NumericError& e) {
      const json diag{{"iteration", it}, {"sample_id", example.id}, {"error", e.what()}};
      core::write_file_atomic(out / "diagnostic.json", diag.dump(2) + "\n");
      throw NumericError(std::string(e.what()) + "; diagnostic written to " + (out / "diagnostic.json").string());
    }
    state.iteration = it;
    result.losses.push_back(step.loss);
    result.point_counts.push_back(state.model.points.size());
    window_sum += step.loss;
    ++window_count;
    if (it % cfg.eval_interval == 0) last_record = log_eval();
  }
  save_checkpoint(state, result.final_checkpoint, last_record);
  return result;
}

void save_checkpoint(const TrainerState& state, const std::filesystem::path& dir, const json& metrics) {
  std::filesystem::create_directories(dir);
  scene::save_audio_points(dir / "points.ply", state.model.points);
  field::save_field(dir / "field.bin", state.model.field, state.config.seed);
  binaural::save_mask_network(dir / "binauralizer.bin", state.model.binauralizer, state.config.seed);

  std::vector<std::pair<std::string, const core::Tensor*>> tensors;
  json steps = json::object();
  add_moments(tensors, steps, "alpha", state.optimizer.alpha);
  for (std::size_t i = 0; i < state.optimizer.networks.size(); ++i)
    add_moments(tensors, steps, "net" + std::to_string(i), state.optimizer.networks[i]);
  core::Tensor sums = core::Tensor::column(state.stats.sums());
  std::vector<double> counts(state.stats.counts().begin(), state.stats.counts().end());
  core::Tensor count_tensor = core::Tensor::column(std::move(counts));
  tensors.push_back({"gradstats.sum", &sums});
  tensors.push_back({"gradstats.count", &count_tensor});
  core::write_weights(dir / "optimizer.bin", {{"kind", "optimizer"}, {"steps", steps}}, tensors);

  const auto& s = state.model.source;
  const json config{{"schema_version", kCheckpointVersion},
                    {"train", to_json(state.config)},
                    {"iteration", state.iteration},
                    {"rng", rng_text(state.rng)},
                    {"best_metric", state.best_metric ? json(*state.best_metric) : json(nullptr)},
                    {"source", {s[0], s[1], s[2]}},
                    {"sample_rate", state.sample_rate},
                    {"rir_length", state.rir_length},
                    {"metrics", metrics}};
  core::write_file_atomic(dir / "config.json", config.dump(2) + "\n");
}

TrainerState load_checkpoint(const std::filesystem::path& dir) {
  json config;
  try {
    config = json::parse(core::read_file(dir / "config.json"));
  } catch (const json::exception& e) {
    throw SchemaError("config.json", "malformed checkpoint config in " + dir.string() + ": " + e.what());
  }
  TrainerState s;
  try {
    if (config.at("schema_version").get<int>() != kCheckpointVersion)
      throw SchemaError("schema_version", "unsupported checkpoint version in " + dir.string());
    s.config = train_config_from_json(config.at("train"));
    s.iteration = config.at("iteration").get<std::size_t>();
    s.rng = rng_from(config.at("rng").get<std::string>());
    if (!config.at("best_metric").is_null()) s.best_metric = config.at("best_metric").get<double>();
    const auto src = config.at("source").get<std::vector<double>>();
    if (src.size() != 3) throw SchemaError("source", "checkpoint source must be a 3-vector");
    s.model.source = {{src[0], src[1], src[2]}};
    s.sample_rate = config.at("sample_rate").get<int>();
    s.rir_length = config.at("rir_length").get<std::size_t>();
  } catch (const json::out_of_range& e) {
    throw SchemaError("config.json", "checkpoint config in " + dir.string() + " is missing a field: " + e.what());
  } catch (const json::type_error& e) {
    throw SchemaError("config.json", "checkpoint config in " + dir.string() + " has a wrong type: " + e.what());
  }
  s.model.points = scene::load_audio_points(dir / "points.ply");
  s.model.field = field::load_field(dir / "field.bin");
  s.model.binauralizer = binaural::load_mask_network(dir / "binauralizer.bin");
  s.model.vicinity_percentile = s.config.vicinity_percentile;
  if (s.model.field.alpha_width() != s.model.points.alpha_width())
    throw SchemaError("field.bin", "field input width does not match the point alpha width");

  const auto opt = core::read_weights(dir / "optimizer.bin");
  try {
    s.optimizer.alpha = read_moments(opt, "alpha");
    const std::size_t n = s.model.network_parameters().size();
    for (std::size_t i = 0; i < n; ++i) s.optimizer.networks.push_back(read_moments(opt, "net" + std::to_string(i)));
  } catch (const json::exception& e) {
    throw SchemaError("optimizer.bin", std::string("optimizer state is incomplete: ") + e.what());
  }
  const auto& sums = opt.get("gradstats.sum");
  const auto& counts = opt.get("gradstats.count");
  std::vector<std::uint64_t> c;
  for (double v : counts.data()) c.push_back(static_cast<std::uint64_t>(v));
  s.stats = GradStats::from({sums.data().begin(), sums.data().end()}, std::move(c));
  if (s.stats.size() != s.model.points.size())
    throw SchemaError("gradstats.sum", "gradient statistics do not cover every point");
  return s;
}

}  // namespace gsaudio::train
