#include <cmath>
#include <random>

#include "doctest.h"
#include "gsaudio/dsp/rir_metrics.hpp"
#include "gsaudio/error.hpp"
#include "oracles.hpp"

using namespace gsaudio;
using namespace gsaudio::dsp;

using oracle::decaying_noise;

TEST_CASE("T60 of synthetic exponential decays is within 5%") {
  for (double t60 : {0.2, 0.5, 1.0}) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto m = rir_metrics_of(decaying_noise(t60, 1.5 * t60, seed));
      CAPTURE(t60);
      CHECK(m.t60_sec >= 0.95 * t60);
      CHECK(m.t60_sec <= 1.05 * t60);
      CHECK(m.edt_sec == doctest::Approx(t60).epsilon(0.15));
    }
  }
}

TEST_CASE("onset alignment makes metrics independent of leading silence") {
  const auto a = rir_metrics_of(decaying_noise(0.4, 0.6, 9));
  const auto b = rir_metrics_of(decaying_noise(0.4, 0.6, 9, 300));
  CHECK(a.t60_sec == doctest::Approx(b.t60_sec).epsilon(1e-12));
  CHECK(a.c50_db == doctest::Approx(b.c50_db).epsilon(1e-12));
}

TEST_CASE("identical responses give zero error") {
  const auto h = decaying_noise(0.5, 0.8, 3);
  const auto e = rir_metrics(h, h);
  CHECK(e.t60_error_percent == 0.0);
  CHECK(e.c50_error_db == 0.0);
  CHECK(e.edt_error_sec == 0.0);
}

TEST_CASE("errors are absolute with T60 relative to ground truth") {
  const auto a = decaying_noise(0.3, 0.6, 4);
  const auto b = decaying_noise(0.6, 0.9, 4);
  const auto ma = rir_metrics_of(a), mb = rir_metrics_of(b);
  const auto e = rir_metrics(a, b);
  CHECK(e.t60_error_percent == doctest::Approx(100.0 * std::fabs(ma.t60_sec - mb.t60_sec) / mb.t60_sec));
  CHECK(e.c50_error_db == doctest::Approx(std::fabs(ma.c50_db - mb.c50_db)));
  CHECK(e.edt_error_sec == doctest::Approx(std::fabs(ma.edt_sec - mb.edt_sec)));
}

TEST_CASE("C50 clamps at +80 dB when all energy is early") {
  ImpulseResponse h;
  h.samples.assign(4000, 0.0);
  for (std::size_t i = 0; i < 600; ++i) h.samples[i] = std::exp(-0.02 * i) * (i % 2 ? -1.0 : 1.0);
  const auto m = rir_metrics_of(h);
  CHECK(m.c50_db == kC50ClampDb);
  CHECK(rir_metrics(h, h).c50_error_db == 0.0);
}

TEST_CASE("C50 follows the closed-form early/late split") {
  // Pure exponential energy decay: C50 = 10 log10(1 - q) - 10 log10(q), q = r^L.
  ImpulseResponse h;
  const double r = std::exp(-6.9078 / (0.4 * h.sample_rate));  // amplitude ratio per sample
  for (std::size_t i = 0; i < 44100; ++i) h.samples.push_back(std::pow(r, static_cast<double>(i)));
  const double q = std::pow(r * r, std::round(0.05 * h.sample_rate));
  const double tail = std::pow(r * r, 44100.0);
  const double expected = 10.0 * std::log10((1.0 - q) / (q - tail));
  CHECK(rir_metrics_of(h).c50_db == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("undefined metrics are reported") {
  ImpulseResponse silent;
  silent.samples.assign(100, 0.0);
  CHECK_THROWS_AS(rir_metrics_of(silent), MetricUndefined);
  // A bare impulse never traverses the -5..-25 dB range.
  ImpulseResponse spike;
  spike.samples.assign(100, 0.0);
  spike.samples[0] = 1.0;
  CHECK_THROWS_AS(rir_metrics_of(spike), MetricUndefined);
}
