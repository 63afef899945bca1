#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsaudio/binaural/mask_network.hpp"
#include "gsaudio/core/tape.hpp"
#include "gsaudio/datagen/dataset.hpp"
#include "gsaudio/dsp/stft.hpp"
#include "gsaudio/field/acoustic_field.hpp"
#include "gsaudio/scene/audio_points.hpp"
#include "gsaudio/train/config.hpp"
#include "gsaudio/train/losses.hpp"

namespace gsaudio::train {

/// Half-width in samples of the moving RMS window that turns a ground-truth
/// IR into the envelope the rir head is fitted to.
inline constexpr std::size_t kEnvelopeHalfWidth = 16;

/// Floor inside the rir-mode log-envelope loss log(|pred| + floor) vs
/// log(target + floor): levels down to -60 dB count, so the decay tail
/// matters as much as the direct sound.
inline constexpr double kEnvelopeFloor = 1e-3;

/// The learnable triple (G_a, F, B) plus the scene facts needed to query it.
struct Model {
  scene::AudioPointSet points;
  field::FieldNetwork field;
  binaural::MaskNetwork binauralizer;
  scene::Vec3 source{{0.0, 0.0, 0.0}};
  double vicinity_percentile = scene::kDefaultVicinityPercentile;

  Mode mode() const noexcept { return binauralizer.mode; }
  /// Field then binauralizer tensors, in parameter-id order after alpha.
  std::vector<core::Tensor*> network_parameters();
  std::vector<const core::Tensor*> network_parameters() const;
};

/// Fresh networks for `points`; weights drawn from `seed`.
Model init_model(const TrainConfig& config, scene::AudioPointSet points, const binaural::SceneBounds& bounds,
                 const scene::Vec3& source, std::uint64_t seed);

/// Scene box of a shoebox room.
binaural::SceneBounds room_bounds(const datagen::ShoeboxRoom& room);

/// One auditory perspective in the form the losses consume.
struct TrainingExample {
  std::size_t id = 0;
  scene::Pose listener;
  core::Tensor mono_magnitude;  // binaural mode, bins x frames
  Spectra target;               // binaural mode
  core::Tensor rir_target;      // rir mode, length x 2
};

TrainingExample make_example(const datagen::Sample& sample, Mode mode, const dsp::StftParams& params = {});

/// sqrt of the centred moving average of h^2 (zero-padded at the edges).
std::vector<double> smoothed_envelope(std::span<const double> h, std::size_t half_width = kEnvelopeHalfWidth);

/// Parameter ids: alpha is 0, network tensors follow network_parameters().
inline constexpr core::ParamId kAlphaId{0};

struct LossGraph {
  core::Var alpha;
  core::Var reconstruction;
  core::Var volume;
  core::Var total;
  field::Vicinities vicinities;
  std::vector<std::size_t> active;  // ascending union of both vicinities
};

/// Records the full stage-2 graph on `tape`. `times` lists the IR sample
/// indices to fit in rir mode and is ignored in binaural mode.
LossGraph build_loss(const Model& model, const TrainingExample& example, double lambda, core::Tape& tape,
                     std::span<const std::size_t> times = {});

/// Forward-only value of build_loss().
double loss_value(const Model& model, const TrainingExample& example, double lambda,
                  std::span<const std::size_t> times = {});

/// Inference: binaural audio for a listener pose (binaural mode).
dsp::StereoWaveform render(const Model& model, const scene::Pose& listener, const dsp::Waveform& mono,
                           const dsp::StftParams& params = {});

/// Inference: per-ear impulse responses (rir mode).
dsp::BinauralIr render_rir(const Model& model, const scene::Pose& listener, std::size_t length, int sample_rate);

struct BinauralScores {
  double mag = 0.0;
  double env = 0.0;
};

struct RirScores {
  double t60_error_percent = 0.0;
  double c50_error_db = 0.0;
  double edt_error_sec = 0.0;
  /// Samples whose prediction had no measurable decay and were scored with
  /// the fallback (T60 and EDT taken as 0).
  std::size_t undefined = 0;
};

/// Mean MAG and ENV of render() over the given samples.
BinauralScores evaluate_binaural(const Model& model, const datagen::Dataset& data,
                                 std::span<const std::size_t> indices, const dsp::StftParams& params = {});

/// Mean absolute T60/C50/EDT errors of render_rir() over the given samples,
/// averaged over both ears.
RirScores evaluate_rir(const Model& model, const datagen::Dataset& data, std::span<const std::size_t> indices);

}  // namespace gsaudio::train
