#pragma once

#include <stdexcept>
#include <string>

namespace mrh {

// Every failure mode the library reports carries one of these codes, so
// callers can branch on the violation without parsing message text.
enum class Errc {
  io_failure,
  malformed_wav,
  non_pcm_wav,
  empty_wav_data,
  unsupported_wav,
  invalid_argument,
  signal_too_short,
  empty_corpus,
  spec_mismatch,
  level_out_of_range,
  segment_count_mismatch,
  empty_scores,
  missing_score,
  invalid_config,
  bad_magic,
  bad_version,
  bad_checksum,
  bad_format,
  unknown_target,
  empty_histogram,
  invalid_rank,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace mrh
