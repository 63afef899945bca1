#pragma once

#include <span>
#include <vector>

#include "gsaudio/dsp/stft.hpp"
#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::dsp {

/// MAG: mean over the two channels of sum_{f,t} (|P| - |G|)^2 / frames.
double mag_distance(const StereoWaveform& pred, const StereoWaveform& gt,
                    const StftParams& params = {});

/// Magnitude of the analytic signal (N-point FFT Hilbert transform).
std::vector<double> envelope(std::span<const double> x);

/// ENV: mean over the two channels of sqrt(sum_n (e_p - e_g)^2 / N).
double env_distance(const StereoWaveform& pred, const StereoWaveform& gt);

}  // namespace gsaudio::dsp
