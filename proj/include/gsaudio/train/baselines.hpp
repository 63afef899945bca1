#pragma once

#include <span>

#include "gsaudio/datagen/dataset.hpp"
#include "gsaudio/dsp/stft.hpp"
#include "gsaudio/dsp/waveform.hpp"
#include "gsaudio/train/model.hpp"

namespace gsaudio::train {

/// Gain applied to the mono input so its energy matches the mean energy of
/// the two target channels.
double mono_energy_gain(const dsp::Waveform& mono, const dsp::StereoWaveform& target);
/// Per-channel gains matching each target channel's energy.
std::array<double, 2> stereo_energy_gains(const dsp::Waveform& mono, const dsp::StereoWaveform& target);

dsp::StereoWaveform mono_mono(const dsp::Waveform& mono);
dsp::StereoWaveform mono_energy(const dsp::Waveform& mono, const dsp::StereoWaveform& target);
dsp::StereoWaveform stereo_energy(const dsp::Waveform& mono, const dsp::StereoWaveform& target);

struct CodecBaselines {
  BinauralScores mono_mono;
  BinauralScores mono_energy;
  BinauralScores stereo_energy;
};

/// Mean MAG/ENV of the three reference predictions over `indices`.
CodecBaselines codec_baselines(const datagen::Dataset& data, std::span<const std::size_t> indices,
                               const dsp::StftParams& params = {});

}  // namespace gsaudio::train
