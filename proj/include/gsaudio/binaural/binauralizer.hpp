#pragma once

#include <cstddef>
#include <vector>

#include "gsaudio/binaural/mask_network.hpp"
#include "gsaudio/core/tensor.hpp"
#include "gsaudio/dsp/stft.hpp"
#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::binaural {

/// Per-frequency masks, F + 1 entries each.
struct AcousticMasks {
  std::vector<double> mixture;     // m_m in (0, 2)
  std::vector<double> difference;  // m_d in [-1, 1]
};

AcousticMasks query_masks(const MaskNetwork& net, const scene::Pose& listener, const core::Tensor& context,
                          std::size_t bins);

struct BinauralOutput {
  dsp::StereoWaveform audio;
  /// Fraction of (bin, frame, channel) cells whose magnitude was clamped at 0.
  double clamped_fraction = 0.0;
};

/// s_l = max((m_m + m_d) / 2 * |S|, 0), s_r = max((m_m - m_d) / 2 * |S|, 0),
/// each resynthesized with the mono phase. Logs a warning when more than 10%
/// of the cells are clamped.
BinauralOutput binauralize(const dsp::Waveform& mono, const AcousticMasks& masks, const dsp::StftParams& params = {});

/// Evaluates the RIR head at every sample index 0..length-1.
dsp::BinauralIr predict_rir(const MaskNetwork& net, const scene::Pose& listener, const core::Tensor& context,
                       std::size_t length, int sample_rate = dsp::kDefaultSampleRate);

}  // namespace gsaudio::binaural
