#include "gsaudio/dsp/rir_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsaudio/error.hpp"

namespace gsaudio::dsp {
namespace {

// Least-squares slope (dB per second) of decay[first..last].
double fit_slope(const std::vector<double>& decay, std::size_t first, std::size_t last, int rate) {
  const double n = static_cast<double>(last - first + 1);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double t = static_cast<double>(i) / rate;
    st += t;
    sy += decay[i];
    stt += t * t;
    sty += t * decay[i];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) return 0.0;
  return (n * sty - st * sy) / denom;
}

std::size_t first_at_or_below(const std::vector<double>& decay, double level) {
  for (std::size_t i = 0; i < decay.size(); ++i)
    if (decay[i] <= level) return i;
  return decay.size();
}

double decay_time(const std::vector<double>& decay, double top, double bottom, int rate, const char* what) {
  const std::size_t first = first_at_or_below(decay, top);
  const std::size_t last_excl = first_at_or_below(decay, bottom);
  if (last_excl >= decay.size() || first >= decay.size())
    throw MetricUndefined(std::string(what) + ": decay range not reached");
  // Include the crossing sample unless it already fell to -infinity.
  const std::size_t last = std::isfinite(decay[last_excl]) ? last_excl : last_excl - 1;
  if (last <= first) throw MetricUndefined(std::string(what) + ": decay range spans a single sample");
  const double slope = fit_slope(decay, first, last, rate);
  if (!(slope < 0.0)) throw MetricUndefined(std::string(what) + ": non-decaying energy curve");
  return -60.0 / slope;
}

}  // namespace

std::size_t direct_onset(std::span<const double> h) {
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::fabs(v));
  if (peak == 0.0) throw MetricUndefined("impulse response is silent");
  const double threshold = 0.01 * peak;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (std::fabs(h[i]) > threshold) return i;
  return 0;
}

std::vector<double> energy_decay_db(std::span<const double> h) {
  std::vector<double> tail(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    tail[i] = acc;
  }
  if (acc == 0.0) throw MetricUndefined("impulse response is silent");
  const double total = tail.empty() ? 0.0 : tail[0];
  std::vector<double> db(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    db[i] = tail[i] > 0.0 ? 10.0 * std::log10(tail[i] / total) : -std::numeric_limits<double>::infinity();
  return db;
}

RirMetrics rir_metrics_of(const ImpulseResponse& h) {
  if (h.sample_rate <= 0) throw ContractViolation("impulse response sample rate must be positive");
  for (double v : h.samples)
    if (!std::isfinite(v)) throw ContractViolation("impulse response has non-finite samples");
  const std::size_t onset = direct_onset(h.samples);
  const std::span<const double> aligned(h.samples.data() + onset, h.samples.size() - onset);
  const auto decay = energy_decay_db(aligned);

  RirMetrics m;
  m.t60_sec = decay_time(decay, -5.0, -25.0, h.sample_rate, "T60");
  m.edt_sec = decay_time(decay, 0.0, -10.0, h.sample_rate, "EDT");

  const std::size_t early_len = static_cast<std::size_t>(std::llround(0.05 * h.sample_rate));
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < aligned.size(); ++i) (i < early_len ? early : late) += aligned[i] * aligned[i];
  if (late == 0.0) m.c50_db = kC50ClampDb;
  else if (early == 0.0) m.c50_db = -kC50ClampDb;
  else m.c50_db = std::clamp(10.0 * std::log10(early / late), -kC50ClampDb, kC50ClampDb);
  return m;
}

RirErrors rir_metrics(const ImpulseResponse& pred, const ImpulseResponse& gt) {
  const RirMetrics p = rir_metrics_of(pred);
  const RirMetrics g = rir_metrics_of(gt);
  RirErrors e;
  e.t60_error_percent = 100.0 * std::fabs(p.t60_sec - g.t60_sec) / g.t60_sec;
  e.c50_error_db = std::fabs(p.c50_db - g.c50_db);
  e.edt_error_sec = std::fabs(p.edt_sec - g.edt_sec);
  return e;
}

}  // namespace gsaudio::dsp
