#include "gsaudio/binaural/binauralizer.hpp"

#include <algorithm>
#include <complex>
#include <numeric>

#include <spdlog/spdlog.h>

#include "gsaudio/error.hpp"

namespace gsaudio::binaural {

AcousticMasks query_masks(const MaskNetwork& net, const scene::Pose& listener, const core::Tensor& context,
                          std::size_t bins) {
  core::Tape tape;
  core::ParamBinder binder(tape);
  const auto vars = forward_masks(net, tape.constant(context), ListenerInputs::from(net, listener), bins, binder);
  const auto& m = vars.mixture.value().data();
  const auto& d = vars.difference.value().data();
  return {{m.begin(), m.end()}, {d.begin(), d.end()}};
}

BinauralOutput binauralize(const dsp::Waveform& mono, const AcousticMasks& masks, const dsp::StftParams& params) {
  const dsp::Spectrogram spec = dsp::stft(mono, params);
  if (masks.mixture.size() != spec.bins() || masks.difference.size() != spec.bins())
    throw ContractViolation("mask length " + std::to_string(masks.mixture.size()) + " does not match " +
                            std::to_string(spec.bins()) + " STFT bins");
  dsp::Spectrogram left = spec, right = spec;
  std::size_t clamped = 0;
  for (std::size_t k = 0; k < spec.bins(); ++k) {
    const double gl = 0.5 * (masks.mixture[k] + masks.difference[k]);
    const double gr = 0.5 * (masks.mixture[k] - masks.difference[k]);
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      // Scaling the complex value by a non-negative gain keeps the mono phase.
      const std::complex<double> x = spec.at(k, t);
      const bool silent = x == std::complex<double>(0.0, 0.0);
      left.at(k, t) = gl > 0.0 ? gl * x : 0.0;
      right.at(k, t) = gr > 0.0 ? gr * x : 0.0;
      clamped += (gl < 0.0 && !silent) + (gr < 0.0 && !silent);
    }
  }
  BinauralOutput out;
  out.clamped_fraction = static_cast<double>(clamped) / static_cast<double>(2 * spec.bins() * spec.frames());
  if (out.clamped_fraction > 0.1)
    spdlog::warn("binauralize: {:.1f}% of spectrogram cells clamped at zero", 100.0 * out.clamped_fraction);
  out.audio.left = dsp::istft(left);
  out.audio.right = dsp::istft(right);
  return out;
}

dsp::BinauralIr predict_rir(const MaskNetwork& net, const scene::Pose& listener, const core::Tensor& context,
                       std::size_t length, int sample_rate) {
  if (length < 1) throw ContractViolation("predict_rir: length must be at least 1");
  dsp::BinauralIr out;
  out.left.sample_rate = out.right.sample_rate = sample_rate;
  out.left.samples.resize(length);
  out.right.samples.resize(length);
  const ListenerInputs in = ListenerInputs::from(net, listener);
  // Chunked so the per-row activations stay small.
  constexpr std::size_t kChunk = 2048;
  std::vector<std::size_t> times;
  for (std::size_t begin = 0; begin < length; begin += kChunk) {
    const std::size_t end = std::min(length, begin + kChunk);
    times.resize(end - begin);
    std::iota(times.begin(), times.end(), begin);
    core::Tape tape;
    core::ParamBinder binder(tape);
    const core::Tensor& amp = forward_rir(net, tape.constant(context), in, times, length, binder).value();
    for (std::size_t i = 0; i < times.size(); ++i) {
      out.left.samples[begin + i] = amp(i, 0);
      out.right.samples[begin + i] = amp(i, 1);
    }
  }
  return out;
}

}  // namespace gsaudio::binaural
