#pragma once

#include <string>

#include "gsaudio/error.hpp"

namespace gsaudio {

/// What the pipeline predicts: binaural audio through spectrogram masks, or
/// per-ear room impulse responses.
enum class Mode { binaural, rir };

inline std::string to_string(Mode mode) { return mode == Mode::binaural ? "binaural" : "rir"; }

inline Mode parse_mode(const std::string& text) {
  if (text == "binaural") return Mode::binaural;
  if (text == "rir") return Mode::rir;
  throw ConfigError("unknown mode '" + text + "' (expected binaural or rir)");
}

}  // namespace gsaudio
