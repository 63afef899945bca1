#include "training_support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <random>

#include "gsaudio/core/gradcheck.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::testing {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gsaudio_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const datagen::Dataset& tiny_dataset(Mode mode) {
  static std::mutex lock;
  static std::map<Mode, datagen::Dataset> cache;
  std::lock_guard guard(lock);
  if (auto it = cache.find(mode); it != cache.end()) return it->second;
  datagen::DatasetConfig cfg;
  cfg.samples = 10;
  cfg.seed = 3;
  cfg.mode = mode;
  cfg.duration_sec = 0.1;
  cfg.rir_duration_sec = 0.05;
  const auto dir = scratch_dir("tiny_" + to_string(mode));
  datagen::synth_dataset(cfg, dir);
  return cache.emplace(mode, datagen::load_dataset(dir)).first->second;
}

train::TrainConfig tiny_config(Mode mode) {
  train::TrainConfig c;
  c.mode = mode;
  c.mask_width = 16;
  c.iterations = 40;
  c.eval_interval = 10;
  c.densify_interval = 0;
  c.prune_interval = 0;
  c.vicinity_percentile = 20.0;
  c.rir_time_samples = 32;
  c.seed = 5;
  return c;
}

scene::AudioPointSet room_points(const datagen::Dataset& data, std::size_t count, std::uint64_t seed,
                                 scene::AttributeSet attributes) {
  return scene::init_audio_points(datagen::synthesize_room_cloud(data.manifest.config.room, count, seed), attributes);
}

namespace {

// Central differences on an O(10) loss carry ~1e-15 absolute rounding noise,
// so a coordinate is only checkable to 1e-4 relative error when its gradient
// is well above noise / step. Coordinates are drawn from those above the floor.
constexpr double kGradientFloor = 1e-4;
constexpr double kStep = 1e-5;
// A ReLU kink inside [x - h, x + h] makes the central difference depend on
// the step. Such coordinates are skipped: D(h) and D(h/2) must agree within
// this (loose) tolerance before the strict comparison is made.
constexpr double kKinkTolerance = 1e-3;

bool smooth_at(const std::function<double(double)>& f, double x) {
  const double d1 = (f(x + kStep) - f(x - kStep)) / (2 * kStep);
  const double d2 = (f(x + kStep / 2) - f(x - kStep / 2)) / kStep;
  return std::fabs(d1 - d2) <= kKinkTolerance * std::max(std::fabs(d1), std::fabs(d2));
}

// Draws `count` distinct candidates that pass smooth_at().
template <typename Slot, typename Probe>
std::vector<Slot> draw_smooth(const std::vector<Slot>& candidates, std::size_t count, std::mt19937_64& rng,
                              Probe probe) {
  if (candidates.empty()) throw ContractViolation("gradcheck: no coordinate above the gradient floor");
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::vector<Slot> out;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries > 50 * count) throw ContractViolation("gradcheck: too few smooth coordinates");
    const Slot& c = candidates[pick(rng)];
    if (std::find(out.begin(), out.end(), c) == out.end() && smooth_at(probe(c), 0.0)) out.push_back(c);
  }
  return out;
}

}  // namespace

GradcheckReport whole_graph_gradcheck(Mode mode, std::size_t points, std::size_t count, std::uint64_t seed) {
  const auto& data = tiny_dataset(mode);
  train::TrainConfig cfg = tiny_config(mode);
  cfg.seed = seed;
  cfg.lambda_a = 0.3;
  const train::Model base =
      train::init_model(cfg, room_points(data, points, seed), train::room_bounds(data.manifest.config.room),
                        data.source(), seed);
  const train::TrainingExample example = train::make_example(data.samples[0], mode);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> times;
  if (mode == Mode::rir) times = train::sample_times(example.rir_target.rows(), 64, rng);

  core::Tape tape;
  const auto graph = train::build_loss(base, example, cfg.lambda_a, tape, times);
  const auto grads = tape.backward(graph.total);

  GradcheckReport report;
  // Alpha entries of the points in either vicinity; the others are not in the graph.
  {
    const std::size_t d = base.points.alpha_width();
    const core::Tensor& g = grads.at(train::kAlphaId);
    std::vector<std::size_t> candidates;
    for (std::size_t i : graph.active)
      for (std::size_t j = 0; j < d; ++j)
        if (std::fabs(g(i, j)) >= kGradientFloor) candidates.push_back(i * d + j);
    const auto coords = draw_smooth(candidates, count, rng, [&](std::size_t c) {
      return std::function<double(double)>([&, c](double dx) {
        train::Model m = base;
        m.points.alpha[c] += dx;
        return train::loss_value(m, example, cfg.lambda_a, times);
      });
    });
    auto f = [&](const core::Tensor& alpha, core::Tensor* gradient) {
      train::Model m = base;
      m.points.alpha = alpha;
      if (gradient) *gradient = grads.at(train::kAlphaId);
      return train::loss_value(m, example, cfg.lambda_a, times);
    };
    report.alpha_error = core::finite_difference_check(f, base.points.alpha, kStep, coords);
    report.alpha_checked = coords.size();
  }
  // Network weights, addressed as (tensor, element) pairs packed into one column.
  {
    const auto params = base.network_parameters();
    std::vector<std::pair<std::size_t, std::size_t>> candidates, slots;
    for (std::size_t t = 0; t < params.size(); ++t) {
      const auto it = grads.find(core::ParamId{static_cast<std::uint32_t>(t + 1)});
      if (it == grads.end()) continue;
      for (std::size_t e = 0; e < it->second.size(); ++e)
        if (std::fabs(it->second[e]) >= kGradientFloor) candidates.emplace_back(t, e);
    }
    slots = draw_smooth(candidates, count, rng, [&](std::pair<std::size_t, std::size_t> c) {
      return std::function<double(double)>([&, c](double dx) {
        train::Model m = base;
        (*m.network_parameters()[c.first])[c.second] += dx;
        return train::loss_value(m, example, cfg.lambda_a, times);
      });
    });
    core::Tensor packed = core::Tensor::zeros(count, 1);
    for (std::size_t i = 0; i < count; ++i) packed[i] = (*params[slots[i].first])[slots[i].second];
    auto f = [&](const core::Tensor& x, core::Tensor* gradient) {
      train::Model m = base;
      auto mp = m.network_parameters();
      for (std::size_t i = 0; i < count; ++i) (*mp[slots[i].first])[slots[i].second] = x[i];
      if (gradient) {
        *gradient = core::Tensor::zeros(count, 1);
        for (std::size_t i = 0; i < count; ++i)
          (*gradient)[i] = grads.at(core::ParamId{static_cast<std::uint32_t>(slots[i].first + 1)})[slots[i].second];
      }
      return train::loss_value(m, example, cfg.lambda_a, times);
    };
    report.weight_error = core::finite_difference_check(f, packed, kStep);
    report.weight_checked = count;
  }
  return report;
}

}  // namespace gsaudio::testing
