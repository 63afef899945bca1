#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::datagen {

enum class SignalKind { pink_noise, sweep };

std::string to_string(SignalKind kind);
SignalKind parse_signal_kind(const std::string& text);  // throws ConfigError

/// 1/f-shaped Gaussian noise, RMS 0.1, with 10 ms raised-cosine fades.
dsp::Waveform pink_noise_burst(std::size_t length, int sample_rate, std::mt19937_64& rng);

/// Exponential sine sweep between two frequencies, amplitude 0.25, faded.
/// The start frequency is drawn in [f0, 2 f0) so each sample differs.
dsp::Waveform sine_sweep(std::size_t length, int sample_rate, std::mt19937_64& rng, double f0 = 40.0,
                         double f1 = 8000.0);

dsp::Waveform make_signal(SignalKind kind, std::size_t length, int sample_rate, std::mt19937_64& rng);

}  // namespace gsaudio::datagen
