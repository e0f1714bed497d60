#pragma once

#include <filesystem>

#include "mrh/signal.hpp"

namespace mrh {

// Reads a RIFF/WAVE file containing integer PCM (format code 1) at 8, 16, or
// 24 bits, mono or stereo. Stereo is downmixed by per-frame arithmetic mean;
// amplitudes are scaled to [-1, 1] by the type's integer full scale. The
// signal id defaults to the file stem.
//
// Errors: io_failure (missing/unreadable file), malformed_wav (bad or
// truncated container), non_pcm_wav, empty_wav_data, unsupported_wav
// (bit depth or channel count outside the supported set).
MusicSignal load_wav(const std::filesystem::path& path);

// Writes a mono PCM WAV at the given bit depth (8, 16, or 24). Samples are
// quantized by rounding to the same full scale load_wav divides by, so a
// load/save/load cycle at a fixed depth reproduces samples exactly.
void save_wav(const std::filesystem::path& path, const MusicSignal& signal,
              unsigned bits_per_sample = 16);

}  // namespace mrh
