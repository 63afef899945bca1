#include "gsaudio/dsp/metrics.hpp"

#include <cmath>

#include "gsaudio/dsp/fft.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::dsp {
namespace {

void check_pair(const StereoWaveform& pred, const StereoWaveform& gt) {
  validate(pred);
  validate(gt);
  if (pred.left.size() != gt.left.size() || pred.left.sample_rate != gt.left.sample_rate)
    throw ContractViolation("prediction and ground truth differ in length or sample rate");
}

double channel_mag(const Waveform& p, const Waveform& g, const StftParams& params) {
  const auto mp = stft(p, params).magnitude();
  const auto mg = stft(g, params).magnitude();
  double acc = 0.0;
  for (std::size_t i = 0; i < mp.size(); ++i) {
    const double d = mp[i] - mg[i];
    acc += d * d;
  }
  return acc / static_cast<double>(mp.cols());
}

double channel_env(const Waveform& p, const Waveform& g) {
  const auto ep = envelope(p.samples);
  const auto eg = envelope(g.samples);
  double acc = 0.0;
  for (std::size_t i = 0; i < ep.size(); ++i) {
    const double d = ep[i] - eg[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(ep.size()));
}

}  // namespace

double mag_distance(const StereoWaveform& pred, const StereoWaveform& gt, const StftParams& params) {
  check_pair(pred, gt);
  return 0.5 * (channel_mag(pred.left, gt.left, params) + channel_mag(pred.right, gt.right, params));
}

std::vector<double> envelope(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<Complex> buf(x.begin(), x.end());
  auto spec = fft(buf);
  // Analytic-signal weights: keep DC (and Nyquist for even n), double the
  // positive frequencies, drop the negative ones.
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) spec[k] *= 2.0;
    else if (2 * k > n) spec[k] = 0.0;
  }
  const auto analytic = ifft(spec);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
  return env;
}

double env_distance(const StereoWaveform& pred, const StereoWaveform& gt) {
  check_pair(pred, gt);
  return 0.5 * (channel_env(pred.left, gt.left) + channel_env(pred.right, gt.right));
}

}  // namespace gsaudio::dsp
