#include "gsaudio/dsp/waveform.hpp"

#include <cmath>

#include "gsaudio/error.hpp"
#include "gsaudio/simd/kernels.hpp"

namespace gsaudio::dsp {

void validate(const Waveform& w) {
  if (w.samples.empty()) throw ContractViolation("waveform is empty");
  if (w.sample_rate <= 0) throw ContractViolation("waveform sample rate must be positive");
  for (double s : w.samples)
    if (!std::isfinite(s)) throw ContractViolation("waveform contains non-finite samples");
}

void validate(const StereoWaveform& w) {
  validate(w.left);
  validate(w.right);
  if (w.left.size() != w.right.size() || w.left.sample_rate != w.right.sample_rate)
    throw ContractViolation("stereo channels differ in length or sample rate");
}

double energy(std::span<const double> x) { return simd::sum_squares(x); }

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(energy(x) / static_cast<double>(x.size()));
}

}  // namespace gsaudio::dsp
