#pragma once

#include <filesystem>
#include <vector>

#include "gsaudio/dsp/waveform.hpp"

namespace gsaudio::dsp {

enum class WavEncoding { pcm16, float32 };

/// Decoded WAV contents, channels de-interleaved, samples in [-1, 1] for PCM.
struct WavData {
  int sample_rate = kDefaultSampleRate;
  std::vector<std::vector<double>> channels;
};

/// Reads PCM16 or IEEE float32 (plain or WAVE_FORMAT_EXTENSIBLE) with one or
/// two channels. Throws IoError on unreadable files and DataError on
/// malformed or unsupported content.
WavData read_wav(const std::filesystem::path& path);

/// Writes a canonical 44-byte-header RIFF file. All channels must share a
/// length. PCM16 values are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const WavData& data,
               WavEncoding encoding = WavEncoding::float32);

Waveform read_mono(const std::filesystem::path& path);
StereoWaveform read_stereo(const std::filesystem::path& path);
void write_mono(const std::filesystem::path& path, const Waveform& w,
                WavEncoding encoding = WavEncoding::float32);
void write_stereo(const std::filesystem::path& path, const StereoWaveform& w,
                  WavEncoding encoding = WavEncoding::float32);

}  // namespace gsaudio::dsp
