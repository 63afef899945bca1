#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "gsaudio/core/tensor.hpp"
#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::dsp {

/// Periodic Hann analysis window. Frames are centred: frame t covers samples
/// [t*hop - window/2, t*hop + window/2), zero-padded outside the signal.
struct StftParams {
  std::size_t window = 512;
  std::size_t hop = 128;

  std::size_t bins() const noexcept { return window / 2 + 1; }
  std::size_t frames(std::size_t signal_length) const noexcept { return 1 + signal_length / hop; }

  friend bool operator==(const StftParams&, const StftParams&) = default;
};

/// Throws ConfigError unless window is a power of two, 0 < hop <= window and
/// the Hann window overlap-adds to a constant at this hop.
void validate(const StftParams& params);

std::vector<double> hann_window(std::size_t length);

/// Complex time-frequency grid stored bin-major: at(bin, frame).
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(StftParams params, int sample_rate, std::size_t signal_length);

  std::size_t bins() const noexcept { return bins_; }
  std::size_t frames() const noexcept { return frames_; }
  const StftParams& params() const noexcept { return params_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t signal_length() const noexcept { return signal_length_; }

  std::complex<double>& at(std::size_t bin, std::size_t frame) { return data_[bin * frames_ + frame]; }
  const std::complex<double>& at(std::size_t bin, std::size_t frame) const {
    return data_[bin * frames_ + frame];
  }

  /// |X| as a (bins x frames) tensor.
  core::Tensor magnitude() const;

 private:
  StftParams params_;
  int sample_rate_ = kDefaultSampleRate;
  std::size_t signal_length_ = 0;
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<std::complex<double>> data_;
};

Spectrogram stft(const Waveform& w, const StftParams& params);

/// Weighted overlap-add inverse; returns signal_length() samples.
Waveform istft(const Spectrogram& s);

}  // namespace gsaudio::dsp
