#include "gsaudio/dsp/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::dsp {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return value;
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  const std::string bytes = core::read_file(path);
  const auto fail = [&](const std::string& why) { return DataError(path.string() + ": " + why); };
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw fail("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_offset = 0, data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const auto size = get<std::uint32_t>(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated data chunk; anything else is corrupt.
      if (id != "data") throw fail("chunk '" + id + "' overruns the file");
    }
    if (id == "fmt ") {
      if (size < 16) throw fail("fmt chunk too short");
      format = get<std::uint16_t>(bytes, body);
      channels = get<std::uint16_t>(bytes, body + 2);
      rate = get<std::uint32_t>(bytes, body + 4);
      bits = get<std::uint16_t>(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw fail("extensible fmt chunk too short");
        format = get<std::uint16_t>(bytes, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data_offset = body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw fail("missing fmt chunk");
  if (data_offset == 0) throw fail("missing data chunk");
  if (channels < 1 || channels > 2) throw fail("unsupported channel count " + std::to_string(channels));
  if (rate == 0) throw fail("zero sample rate");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32)
    throw fail("unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  WavData out;
  out.sample_rate = static_cast<int>(rate);
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = data_offset + (i * channels + c) * width;
      const double v = pcm16 ? get<std::int16_t>(bytes, at) / 32768.0 : static_cast<double>(get<float>(bytes, at));
      if (!std::isfinite(v)) throw fail("non-finite sample");
      out.channels[c][i] = v;
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const WavData& data, WavEncoding encoding) {
  const std::size_t channels = data.channels.size();
  if (channels < 1 || channels > 2) throw ContractViolation("WAV output supports one or two channels");
  if (data.sample_rate <= 0) throw ContractViolation("sample rate must be positive");
  const std::size_t frames = data.channels[0].size();
  for (const auto& ch : data.channels)
    if (ch.size() != frames) throw ContractViolation("WAV channels differ in length");

  const bool pcm = encoding == WavEncoding::pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * block);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put<std::uint32_t>(out, 36 + data_size);
  out += "WAVEfmt ";
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(channels));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data.sample_rate));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data.sample_rate) * block);
  put<std::uint16_t>(out, block);
  put<std::uint16_t>(out, bits);
  out += "data";
  put<std::uint32_t>(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = data.channels[c][i];
      if (!std::isfinite(v)) throw ContractViolation("cannot write non-finite sample");
      if (pcm) put<std::int16_t>(out, static_cast<std::int16_t>(std::lround(std::clamp(v, -1.0, 1.0) * 32767.0)));
      else put<float>(out, static_cast<float>(v));
    }
  }
  core::write_file_atomic(path, out);
}

Waveform read_mono(const std::filesystem::path& path) {
  WavData d = read_wav(path);
  if (d.channels.size() != 1) throw DataError(path.string() + ": expected a mono file");
  return Waveform{std::move(d.channels[0]), d.sample_rate};
}

StereoWaveform read_stereo(const std::filesystem::path& path) {
  WavData d = read_wav(path);
  if (d.channels.size() != 2) throw DataError(path.string() + ": expected a 2-channel file");
  return StereoWaveform{Waveform{std::move(d.channels[0]), d.sample_rate},
                        Waveform{std::move(d.channels[1]), d.sample_rate}};
}

void write_mono(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding) {
  write_wav(path, WavData{w.sample_rate, {w.samples}}, encoding);
}

void write_stereo(const std::filesystem::path& path, const StereoWaveform& w, WavEncoding encoding) {
  if (w.left.sample_rate != w.right.sample_rate) throw ContractViolation("channel sample rates differ");
  write_wav(path, WavData{w.left.sample_rate, {w.left.samples, w.right.samples}}, encoding);
}

}  // namespace gsaudio::dsp
