#pragma once

#include <span>
#include <vector>

namespace gsaudio::dsp {

inline constexpr int kDefaultSampleRate = 22050;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Left/right channel pair (a_l, a_r).
struct StereoWaveform {
  Waveform left;
  Waveform right;
};

struct ImpulseResponse {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;
};

/// Per-ear impulse responses.
struct BinauralIr {
  ImpulseResponse left;
  ImpulseResponse right;
};

/// Throws ContractViolation unless non-empty, finite, positive rate.
void validate(const Waveform& w);
void validate(const StereoWaveform& w);

double rms(std::span<const double> x);
double energy(std::span<const double> x);

}  // namespace gsaudio::dsp
