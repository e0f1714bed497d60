#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrh/error.hpp"

namespace mrh {

// A mono signal with amplitudes normalized to [-1, 1].
struct MusicSignal {
  std::string id;
  std::vector<float> samples;
  std::uint32_t sample_rate = 0;

  std::size_t length() const { return samples.size(); }
};

struct Corpus {
  std::vector<MusicSignal> signals;

  std::size_t size() const { return signals.size(); }
};

// A contiguous view into a parent signal's samples. Valid only while the
// parent's sample buffer is alive.
struct Segment {
  std::string parent_id;
  std::uint32_t level = 0;
  std::uint32_t position = 0;
  std::span<const float> samples;
};

// Raises invalid_argument naming the violated invariant (empty id, empty
// samples, non-finite or out-of-range amplitude).
void validate(const MusicSignal& signal);

// Recursive dyadic split: result[j] holds the 2^j segments of level j in
// position order. Each halving gives the left child the first ceil(n/2)
// samples and the right child the rest, so concatenating any level in order
// reproduces the input exactly. Raises signal_too_short when
// samples.size() < 2^levels (some deepest segment would be empty).
std::vector<std::vector<Segment>> split_dyadic(std::span<const float> samples,
                                               std::uint32_t levels,
                                               const std::string& parent_id = {});

std::vector<std::vector<Segment>> split_dyadic(const MusicSignal& signal, std::uint32_t levels);

// Deterministic synthetic corpus: each signal is a sum of 1-3 seeded
// sinusoids plus uniform noise, generated from SplitMix64 streams so that
// identical arguments always reproduce identical corpora. The draw order is
// documented in the README and is part of the format contract.
Corpus synth_corpus(std::uint64_t seed, std::uint32_t count, std::uint32_t length,
                    std::uint32_t sample_rate, double noise_amp = 0.1);

}  // namespace mrh
