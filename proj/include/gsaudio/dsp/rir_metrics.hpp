#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::dsp {

struct RirMetrics {
  double t60_sec = 0.0;
  double c50_db = 0.0;
  double edt_sec = 0.0;
};

struct RirErrors {
  double t60_error_percent = 0.0;
  double c50_error_db = 0.0;
  double edt_error_sec = 0.0;
};

inline constexpr double kC50ClampDb = 80.0;

/// First sample whose magnitude exceeds 1% of the peak magnitude.
std::size_t direct_onset(std::span<const double> h);

/// Schroeder backward-integrated energy, in dB relative to the total.
/// Samples after the last non-zero one map to -infinity.
std::vector<double> energy_decay_db(std::span<const double> h);

/// T60 from a -5..-25 dB line fit, EDT from a 0..-10 dB fit (both on the
/// onset-aligned decay curve, extrapolated to 60 dB) and C50 with a 50 ms
/// early window after onset, clamped to +/-80 dB. Throws MetricUndefined when
/// the response is silent or the decay range is not reached.
RirMetrics rir_metrics_of(const ImpulseResponse& h);

/// Absolute errors; T60 as a percentage of the ground truth.
RirErrors rir_metrics(const ImpulseResponse& pred, const ImpulseResponse& gt);

}  // namespace gsaudio::dsp
