#include "gsaudio/dsp/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsaudio/dsp/fft.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::dsp {

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length));
  return w;
}

void validate(const StftParams& params) {
  const std::size_t w = params.window;
  if (w < 2 || (w & (w - 1)) != 0) throw ConfigError("STFT window must be a power of two >= 2");
  if (params.hop == 0 || params.hop > w) throw ConfigError("STFT hop must be in (0, window]");
  const auto win = hann_window(w);
  double lo = 1e300, hi = -1e300;
  for (std::size_t n = 0; n < params.hop; ++n) {
    double s = 0.0;
    for (std::size_t m = n; m < w; m += params.hop) s += win[m];
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi - lo > 1e-9 * hi)
    throw ConfigError("Hann window of length " + std::to_string(w) +
                      " is not constant-overlap-add at hop " + std::to_string(params.hop));
}

Spectrogram::Spectrogram(StftParams params, int sample_rate, std::size_t signal_length)
    : params_(params),
      sample_rate_(sample_rate),
      signal_length_(signal_length),
      bins_(params.bins()),
      frames_(params.frames(signal_length)),
      data_(bins_ * frames_) {}

core::Tensor Spectrogram::magnitude() const {
  core::Tensor out = core::Tensor::zeros(bins_, frames_);
  auto o = out.data();
  for (std::size_t i = 0; i < data_.size(); ++i) o[i] = std::abs(data_[i]);
  return out;
}

Spectrogram stft(const Waveform& w, const StftParams& params) {
  if (w.samples.empty()) throw ContractViolation("stft: empty waveform");
  validate(params);
  const std::size_t win_len = params.window;
  const std::size_t half = win_len / 2;
  const auto win = hann_window(win_len);
  const std::size_t n = w.samples.size();
  Spectrogram s(params, w.sample_rate, n);

  std::vector<double> frame(win_len);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    const long start = static_cast<long>(t * params.hop) - static_cast<long>(half);
    for (std::size_t m = 0; m < win_len; ++m) {
      const long idx = start + static_cast<long>(m);
      frame[m] = (idx >= 0 && idx < static_cast<long>(n)) ? w.samples[static_cast<std::size_t>(idx)] * win[m] : 0.0;
    }
    const auto spec = rfft(frame);
    for (std::size_t k = 0; k < s.bins(); ++k) s.at(k, t) = spec[k];
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  const StftParams& params = s.params();
  validate(params);
  const std::size_t win_len = params.window;
  const std::size_t half = win_len / 2;
  const auto win = hann_window(win_len);
  const std::size_t n = s.signal_length();
  std::vector<double> acc(n, 0.0), norm(n, 0.0);
  std::vector<std::complex<double>> spec(s.bins());
  for (std::size_t t = 0; t < s.frames(); ++t) {
    for (std::size_t k = 0; k < s.bins(); ++k) spec[k] = s.at(k, t);
    const auto frame = irfft(spec, win_len);
    const long start = static_cast<long>(t * params.hop) - static_cast<long>(half);
    for (std::size_t m = 0; m < win_len; ++m) {
      const long idx = start + static_cast<long>(m);
      if (idx < 0 || idx >= static_cast<long>(n)) continue;
      acc[static_cast<std::size_t>(idx)] += frame[m] * win[m];
      norm[static_cast<std::size_t>(idx)] += win[m] * win[m];
    }
  }
  Waveform out;
  out.sample_rate = s.sample_rate();
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = norm[i] > 1e-10 ? acc[i] / norm[i] : 0.0;
  return out;
}

}  // namespace gsaudio::dsp
