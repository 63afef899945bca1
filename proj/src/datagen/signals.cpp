#include "gsaudio/datagen/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsaudio/dsp/fft.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::datagen {
namespace {

void apply_fades(std::vector<double>& x, int sample_rate) {
  const std::size_t fade = std::min<std::size_t>(x.size() / 2, static_cast<std::size_t>(0.01 * sample_rate));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(fade));
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

}  // namespace

std::string to_string(SignalKind kind) { return kind == SignalKind::pink_noise ? "pink_noise" : "sweep"; }

SignalKind parse_signal_kind(const std::string& text) {
  if (text == "pink_noise" || text == "pink") return SignalKind::pink_noise;
  if (text == "sweep") return SignalKind::sweep;
  throw ConfigError("unknown signal kind '" + text + "' (expected pink_noise or sweep)");
}

dsp::Waveform pink_noise_burst(std::size_t length, int sample_rate, std::mt19937_64& rng) {
  if (length == 0) throw ContractViolation("signal length must be positive");
  std::normal_distribution<double> white;
  std::vector<double> x(length);
  for (double& v : x) v = white(rng);
  auto spec = dsp::rfft(x);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) spec[k] /= std::sqrt(static_cast<double>(k));
  x = dsp::irfft(spec, length);
  double energy = 0.0;
  for (double v : x) energy += v * v;
  const double scale = energy > 0.0 ? 0.1 / std::sqrt(energy / static_cast<double>(length)) : 0.0;
  for (double& v : x) v *= scale;
  apply_fades(x, sample_rate);
  return {std::move(x), sample_rate};
}

dsp::Waveform sine_sweep(std::size_t length, int sample_rate, std::mt19937_64& rng, double f0, double f1) {
  if (length == 0) throw ContractViolation("signal length must be positive");
  std::uniform_real_distribution<double> start(f0, 2.0 * f0);
  const double a = start(rng);
  const double duration = static_cast<double>(length) / sample_rate;
  const double rate = std::log(f1 / a);
  std::vector<double> x(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double phase = 2.0 * std::numbers::pi * a * duration / rate * (std::exp(t * rate / duration) - 1.0);
    x[i] = 0.25 * std::sin(phase);
  }
  apply_fades(x, sample_rate);
  return {std::move(x), sample_rate};
}

dsp::Waveform make_signal(SignalKind kind, std::size_t length, int sample_rate, std::mt19937_64& rng) {
  return kind == SignalKind::pink_noise ? pink_noise_burst(length, sample_rate, rng)
                                        : sine_sweep(length, sample_rate, rng);
}

}  // namespace gsaudio::datagen
