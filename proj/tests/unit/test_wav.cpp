#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gsaudio/dsp/wav.hpp"
#include "gsaudio/error.hpp"

using namespace gsaudio;
using namespace gsaudio::dsp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gsaudio_test_wav";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("float32 stereo round trip is exact for float-representable samples") {
  StereoWaveform w;
  w.left.sample_rate = w.right.sample_rate = 16000;
  for (int i = 0; i < 500; ++i) {
    w.left.samples.push_back(static_cast<float>(std::sin(0.01 * i)));
    w.right.samples.push_back(static_cast<float>(-0.5 * std::cos(0.03 * i)));
  }
  const auto path = scratch("stereo.wav");
  write_stereo(path, w);
  CHECK(fs::file_size(path) == 44 + 500 * 2 * 4);
  const auto back = read_stereo(path);
  CHECK(back.left.sample_rate == 16000);
  CHECK(back.left.samples == w.left.samples);
  CHECK(back.right.samples == w.right.samples);
}

TEST_CASE("pcm16 mono round trip within quantization") {
  Waveform w;
  for (int i = 0; i < 300; ++i) w.samples.push_back(0.9 * std::sin(0.05 * i));
  const auto path = scratch("mono16.wav");
  write_mono(path, w, WavEncoding::pcm16);
  CHECK(fs::file_size(path) == 44 + 300 * 2);
  const auto back = read_mono(path);
  REQUIRE(back.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::fabs(back.samples[i] - w.samples[i]) < 1.0 / 16000.0);
}

TEST_CASE("channel-count and format errors") {
  Waveform w;
  w.samples = {0.1, 0.2};
  const auto path = scratch("one.wav");
  write_mono(path, w);
  CHECK_THROWS_AS(read_stereo(path), DataError);
  CHECK_THROWS_AS(read_mono(scratch("missing.wav")), IoError);
  const auto junk = scratch("junk.wav");
  std::ofstream(junk) << "definitely not audio";
  CHECK_THROWS_AS(read_wav(junk), DataError);
}

TEST_CASE("extensible float headers are accepted") {
  // 68-byte header: RIFF, fmt (40 bytes, WAVE_FORMAT_EXTENSIBLE), data.
  std::string bytes;
  auto u32 = [&](std::uint32_t v) { bytes.append(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { bytes.append(reinterpret_cast<const char*>(&v), 2); };
  const float samples[2] = {0.25f, -0.75f};
  bytes += "RIFF";
  u32(4 + 48 + 8 + 8);
  bytes += "WAVEfmt ";
  u32(40);
  u16(0xFFFE); u16(1); u32(8000); u32(32000); u16(4); u16(32);
  u16(22); u16(32); u32(4);
  u16(3); bytes.append("\x00\x00\x00\x00\x10\x00\x80\x00\x00\xAA\x00\x38\x9B\x71", 14);
  bytes += "data";
  u32(8);
  bytes.append(reinterpret_cast<const char*>(samples), 8);
  const auto path = scratch("ext.wav");
  std::ofstream(path, std::ios::binary) << bytes;
  const auto w = read_mono(path);
  CHECK(w.sample_rate == 8000);
  CHECK(w.samples == std::vector<double>{0.25, -0.75});
}
