#include "mrh/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mrh/rng.hpp"

namespace mrh {

void validate(const MusicSignal& signal) {
  if (signal.id.empty()) {
    raise(Errc::invalid_argument, "signal id must be non-empty");
  }
  if (signal.samples.empty()) {
    raise(Errc::invalid_argument, "signal '" + signal.id + "' has no samples");
  }
  if (signal.sample_rate == 0) {
    raise(Errc::invalid_argument, "signal '" + signal.id + "' has zero sample rate");
  }
  for (float s : signal.samples) {
    if (!std::isfinite(s) || s < -1.0f || s > 1.0f) {
      raise(Errc::invalid_argument,
            "signal '" + signal.id + "' has a sample outside [-1, 1]");
    }
  }
}

std::vector<std::vector<Segment>> split_dyadic(std::span<const float> samples,
                                               std::uint32_t levels,
                                               const std::string& parent_id) {
  if (samples.empty()) {
    raise(Errc::invalid_argument, "cannot split an empty sequence");
  }
  if (levels >= 64 || samples.size() < (std::uint64_t{1} << levels)) {
    raise(Errc::signal_too_short,
          "sequence of length " + std::to_string(samples.size()) +
              " cannot be split into 2^" + std::to_string(levels) +
              " non-empty segments");
  }

  std::vector<std::vector<Segment>> out(levels + 1);
  out[0].push_back(Segment{parent_id, 0, 0, samples});
  for (std::uint32_t j = 0; j < levels; ++j) {
    out[j + 1].reserve(out[j].size() * 2);
    for (const Segment& seg : out[j]) {
      const std::size_t n = seg.samples.size();
      const std::size_t left = (n + 1) / 2;  // ceil-left rule for odd lengths
      out[j + 1].push_back(
          Segment{parent_id, j + 1, seg.position * 2, seg.samples.first(left)});
      out[j + 1].push_back(
          Segment{parent_id, j + 1, seg.position * 2 + 1, seg.samples.subspan(left)});
    }
  }
  return out;
}

std::vector<std::vector<Segment>> split_dyadic(const MusicSignal& signal, std::uint32_t levels) {
  return split_dyadic(std::span<const float>(signal.samples), levels, signal.id);
}

Corpus synth_corpus(std::uint64_t seed, std::uint32_t count, std::uint32_t length,
                    std::uint32_t sample_rate, double noise_amp) {
  if (count == 0) {
    raise(Errc::invalid_argument, "corpus size must be at least 1");
  }
  if (length < 2) {
    raise(Errc::invalid_argument, "signal length must be at least 2");
  }
  if (sample_rate == 0) {
    raise(Errc::invalid_argument, "sample rate must be positive");
  }
  if (!(noise_amp >= 0.0) || noise_amp >= 1.0) {
    raise(Errc::invalid_argument, "noise amplitude must lie in [0, 1)");
  }

  Corpus corpus;
  corpus.signals.reserve(count);
  SplitMix64 master(seed);
  const double rate = static_cast<double>(sample_rate);
  const double sine_budget = std::max(0.0, 0.95 - noise_amp);

  for (std::uint32_t k = 0; k < count; ++k) {
    SplitMix64 rng(master.next());

    const std::uint32_t n_sines = 1 + static_cast<std::uint32_t>(rng.below(3));
    std::vector<double> freq(n_sines), phase(n_sines), amp(n_sines);
    double amp_sum = 0.0;
    for (std::uint32_t j = 0; j < n_sines; ++j) {
      freq[j] = rng.uniform(20.0, std::max(40.0, 0.45 * rate));
      phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      amp[j] = rng.uniform(0.2, 1.0);
      amp_sum += amp[j];
    }
    for (std::uint32_t j = 0; j < n_sines; ++j) {
      amp[j] *= sine_budget / amp_sum;
    }

    MusicSignal sig;
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%04u", k);
    sig.id = name;
    sig.sample_rate = sample_rate;
    sig.samples.resize(length);
    for (std::uint32_t i = 0; i < length; ++i) {
      double x = 0.0;
      for (std::uint32_t j = 0; j < n_sines; ++j) {
        x += amp[j] * std::sin(2.0 * std::numbers::pi * freq[j] * i / rate + phase[j]);
      }
      x += noise_amp * rng.uniform(-1.0, 1.0);
      sig.samples[i] = static_cast<float>(std::clamp(x, -1.0, 1.0));
    }
    corpus.signals.push_back(std::move(sig));
  }
  return corpus;
}

}  // namespace mrh
