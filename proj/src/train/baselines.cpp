#include "gsaudio/train/baselines.hpp"

#include <cmath>

#include "gsaudio/dsp/metrics.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::train {
namespace {

double energy_ratio(double target, double source) {
  if (!(source > 0.0)) throw DataError("energy baseline: the mono input is silent");
  return std::sqrt(target / source);
}

dsp::Waveform scaled(const dsp::Waveform& w, double gain) {
  dsp::Waveform out = w;
  for (double& x : out.samples) x *= gain;
  return out;
}

}  // namespace

double mono_energy_gain(const dsp::Waveform& mono, const dsp::StereoWaveform& target) {
  const double e = 0.5 * (dsp::energy(target.left.samples) + dsp::energy(target.right.samples));
  return energy_ratio(e, dsp::energy(mono.samples));
}

std::array<double, 2> stereo_energy_gains(const dsp::Waveform& mono, const dsp::StereoWaveform& target) {
  const double e = dsp::energy(mono.samples);
  return {energy_ratio(dsp::energy(target.left.samples), e), energy_ratio(dsp::energy(target.right.samples), e)};
}

dsp::StereoWaveform mono_mono(const dsp::Waveform& mono) { return {mono, mono}; }

dsp::StereoWaveform mono_energy(const dsp::Waveform& mono, const dsp::StereoWaveform& target) {
  const double g = mono_energy_gain(mono, target);
  return {scaled(mono, g), scaled(mono, g)};
}

dsp::StereoWaveform stereo_energy(const dsp::Waveform& mono, const dsp::StereoWaveform& target) {
  const auto g = stereo_energy_gains(mono, target);
  return {scaled(mono, g[0]), scaled(mono, g[1])};
}

CodecBaselines codec_baselines(const datagen::Dataset& data, std::span<const std::size_t> indices,
                               const dsp::StftParams& params) {
  if (indices.empty()) throw ConfigError("codec_baselines: the split is empty");
  CodecBaselines out;
  auto add = [&](BinauralScores& acc, const dsp::StereoWaveform& pred, const dsp::StereoWaveform& gt) {
    acc.mag += dsp::mag_distance(pred, gt, params);
    acc.env += dsp::env_distance(pred, gt);
  };
  for (std::size_t i : indices) {
    const auto& s = data.samples.at(i);
    add(out.mono_mono, mono_mono(s.mono), s.binaural);
    add(out.mono_energy, mono_energy(s.mono, s.binaural), s.binaural);
    add(out.stereo_energy, stereo_energy(s.mono, s.binaural), s.binaural);
  }
  const double n = static_cast<double>(indices.size());
  for (BinauralScores* b : {&out.mono_mono, &out.mono_energy, &out.stereo_energy}) {
    b->mag /= n;
    b->env /= n;
  }
  return out;
}

}  // namespace gsaudio::train
