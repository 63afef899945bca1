#include "gsaudio/train/model.hpp"

#include <algorithm>
#include <cmath>

#include "gsaudio/binaural/binauralizer.hpp"
#include "gsaudio/core/parallel.hpp"
#include "gsaudio/dsp/metrics.hpp"
#include "gsaudio/dsp/rir_metrics.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::train {
namespace {

std::vector<std::size_t> union_of(const field::Vicinities& v) {
  std::vector<std::size_t> out;
  std::set_union(v.source.begin(), v.source.end(), v.listener.begin(), v.listener.end(), std::back_inserter(out));
  return out;
}

core::Tensor ir_columns(const dsp::BinauralIr& ir) {
  const std::size_t n = ir.left.samples.size();
  if (ir.right.samples.size() != n) throw DataError("impulse response channels differ in length");
  const auto l = smoothed_envelope(ir.left.samples);
  const auto r = smoothed_envelope(ir.right.samples);
  // Both ears share one scale so the interaural level difference survives.
  const double peak = std::max(*std::max_element(l.begin(), l.end()), *std::max_element(r.begin(), r.end()));
  core::Tensor t = core::Tensor::zeros(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, 0) = l[i] * (peak > 0.0 ? 1.0 / peak : 0.0);
    t(i, 1) = r[i] * (peak > 0.0 ? 1.0 / peak : 0.0);
  }
  return t;
}

dsp::RirErrors scored_errors(const dsp::ImpulseResponse& pred, const dsp::ImpulseResponse& gt, bool& undefined) {
  const dsp::RirMetrics g = dsp::rir_metrics_of(gt);
  dsp::RirMetrics p;
  try {
    p = dsp::rir_metrics_of(pred);
  } catch (const MetricUndefined&) {
    undefined = true;
  }
  return {100.0 * std::fabs(p.t60_sec - g.t60_sec) / g.t60_sec, std::fabs(p.c50_db - g.c50_db),
          std::fabs(p.edt_sec - g.edt_sec)};
}

}  // namespace

std::vector<core::Tensor*> Model::network_parameters() {
  auto out = field.parameters();
  for (core::Tensor* t : binauralizer.parameters()) out.push_back(t);
  return out;
}

std::vector<const core::Tensor*> Model::network_parameters() const {
  auto params = const_cast<Model*>(this)->network_parameters();
  return {params.begin(), params.end()};
}

Model init_model(const TrainConfig& config, scene::AudioPointSet points, const binaural::SceneBounds& bounds,
                 const scene::Vec3& source, std::uint64_t seed) {
  scene::validate(points);
  std::mt19937_64 rng(seed);
  Model m;
  m.field = field::FieldNetwork::random(points.alpha_width(), rng);
  m.binauralizer =
      binaural::MaskNetwork::random(config.mode, config.resolved_mask_width(), 2 * m.field.context_width(), bounds, rng);
  m.points = std::move(points);
  m.source = source;
  m.vicinity_percentile = config.vicinity_percentile;
  return m;
}

binaural::SceneBounds room_bounds(const datagen::ShoeboxRoom& room) {
  return {{{0.0, 0.0, 0.0}}, {{room.dimensions[0], room.dimensions[1], room.dimensions[2]}}};
}

std::vector<double> smoothed_envelope(std::span<const double> h, std::size_t half_width) {
  const std::size_t n = h.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + h[i] * h[i];
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half_width ? i - half_width : 0;
    const std::size_t hi = std::min(n, i + half_width + 1);
    env[i] = std::sqrt(std::max(0.0, prefix[hi] - prefix[lo]) / static_cast<double>(2 * half_width + 1));
  }
  return env;
}

TrainingExample make_example(const datagen::Sample& sample, Mode mode, const dsp::StftParams& params) {
  TrainingExample ex;
  ex.id = sample.record.id;
  ex.listener = sample.record.listener;
  if (mode == Mode::binaural) {
    ex.mono_magnitude = dsp::stft(sample.mono, params).magnitude();
    ex.target = target_spectra(dsp::stft(sample.binaural.left, params).magnitude(),
                               dsp::stft(sample.binaural.right, params).magnitude());
  } else {
    if (!sample.rir) throw ConfigError("rir-mode training needs a dataset with impulse responses");
    ex.rir_target = ir_columns(*sample.rir);
  }
  return ex;
}

LossGraph build_loss(const Model& model, const TrainingExample& example, double lambda, core::Tape& tape,
                     std::span<const std::size_t> times) {
  core::ParamBinder binder(tape);
  const auto params = model.network_parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    binder.track(*params[i], core::ParamId{static_cast<std::uint32_t>(i + 1)});

  LossGraph g;
  g.alpha = tape.parameter(kAlphaId, model.points.alpha);
  g.vicinities = field::find_vicinities(model.points, example.listener.position, model.source,
                                        model.vicinity_percentile);
  g.active = union_of(g.vicinities);
  const core::Var context = field::pooled_context(model.field, g.alpha, model.points, example.listener.position,
                                                  model.source, g.vicinities, binder);
  const auto in = binaural::ListenerInputs::from(model.binauralizer, example.listener);

  if (model.mode() == Mode::binaural) {
    const core::Var mono = tape.constant(example.mono_magnitude);
    const auto masks = binaural::forward_masks(model.binauralizer, context, in, example.mono_magnitude.rows(), binder);
    const core::Var s_m = masks.mixture * mono;
    const core::Var s_l = core::relu(0.5 * (masks.mixture + masks.difference)) * mono;
    const core::Var s_r = core::relu(0.5 * (masks.mixture - masks.difference)) * mono;
    g.reconstruction = loss_reconstruction(s_m, s_l, s_r, example.target);
  } else {
    if (times.empty()) throw ContractViolation("build_loss: rir mode needs at least one time index");
    const std::size_t length = example.rir_target.rows();
    const core::Var pred = binaural::forward_rir(model.binauralizer, context, in, times, length, binder);
    core::Tensor target = example.rir_target.select_rows(times);
    for (double& v : target.data()) v = std::log(v + kEnvelopeFloor);
    // Sum over both ears of the mean squared log-envelope error.
    const core::Var residual = core::log(core::abs(pred), kEnvelopeFloor) - tape.constant(target);
    g.reconstruction = 2.0 * core::mean(core::square(residual));
  }
  g.volume = loss_volume(g.alpha, g.active);
  g.total = total_loss(g.reconstruction, g.volume, lambda);
  return g;
}

double loss_value(const Model& model, const TrainingExample& example, double lambda,
                  std::span<const std::size_t> times) {
  core::Tape tape;
  return build_loss(model, example, lambda, tape, times).total.value().item();
}

dsp::StereoWaveform render(const Model& model, const scene::Pose& listener, const dsp::Waveform& mono,
                           const dsp::StftParams& params) {
  if (model.mode() != Mode::binaural) throw ConfigError("render needs a binaural-mode model");
  const core::Tensor context =
      field::pooled_context(model.field, model.points, listener, model.source, model.vicinity_percentile);
  const auto masks = binaural::query_masks(model.binauralizer, listener, context, params.bins());
  return binaural::binauralize(mono, masks, params).audio;
}

dsp::BinauralIr render_rir(const Model& model, const scene::Pose& listener, std::size_t length, int sample_rate) {
  if (model.mode() != Mode::rir) throw ConfigError("render_rir needs an rir-mode model");
  const core::Tensor context =
      field::pooled_context(model.field, model.points, listener, model.source, model.vicinity_percentile);
  return binaural::predict_rir(model.binauralizer, listener, context, length, sample_rate);
}

BinauralScores evaluate_binaural(const Model& model, const datagen::Dataset& data,
                                 std::span<const std::size_t> indices, const dsp::StftParams& params) {
  if (indices.empty()) throw ConfigError("evaluation split is empty");
  std::vector<BinauralScores> per(indices.size());
  core::parallel_for(indices.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = data.samples.at(indices[i]);
      const auto pred = render(model, s.record.listener, s.mono, params);
      per[i] = {dsp::mag_distance(pred, s.binaural, params), dsp::env_distance(pred, s.binaural)};
    }
  });
  BinauralScores out;
  for (const auto& p : per) {
    out.mag += p.mag;
    out.env += p.env;
  }
  out.mag /= static_cast<double>(per.size());
  out.env /= static_cast<double>(per.size());
  return out;
}

RirScores evaluate_rir(const Model& model, const datagen::Dataset& data, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("evaluation split is empty");
  struct Row {
    dsp::RirErrors e[2];
    std::size_t undefined = 0;
  };
  std::vector<Row> per(indices.size());
  core::parallel_for(indices.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = data.samples.at(indices[i]);
      if (!s.rir) throw ConfigError("rir evaluation needs a dataset with impulse responses");
      const auto& gt = *s.rir;
      const auto pred = render_rir(model, s.record.listener, gt.left.samples.size(), gt.left.sample_rate);
      bool undefined_l = false, undefined_r = false;
      per[i].e[0] = scored_errors(pred.left, gt.left, undefined_l);
      per[i].e[1] = scored_errors(pred.right, gt.right, undefined_r);
      per[i].undefined = undefined_l + undefined_r;
    }
  });
  RirScores out;
  for (const auto& row : per)
    for (const auto& e : row.e) {
      out.t60_error_percent += e.t60_error_percent;
      out.c50_error_db += e.c50_error_db;
      out.edt_error_sec += e.edt_error_sec;
    }
  for (const auto& row : per) out.undefined += row.undefined;
  const double n = 2.0 * static_cast<double>(per.size());
  out.t60_error_percent /= n;
  out.c50_error_db /= n;
  out.edt_error_sec /= n;
  return out;
}

}  // namespace gsaudio::train
