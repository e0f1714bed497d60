#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "mrh/mrh_tree.hpp"
#include "mrh/signal.hpp"

namespace mrh {

// Build parameters shared by every entry of an Index.
struct IndexParams {
  std::uint32_t bins = 0;    // histogram bins per node
  std::uint32_t levels = 0;  // tree depth
  double min_amp = 0.0;      // corpus-wide amplitude range, pre-clamping
  double max_amp = 0.0;
  bool normalized_input = true;  // signals were scaled to [-1, 1] at load

  bool operator==(const IndexParams&) const = default;
};

struct Index {
  IndexParams params;
  std::map<std::string, MultiResHistogram> entries;
  std::map<std::string, std::uint64_t> song_lengths;

  std::size_t size() const { return entries.size(); }
  BinSpec bin_spec() const { return BinSpec{params.min_amp, params.max_amp, params.bins}; }

  bool operator==(const Index&) const = default;
};

// Smallest and largest sample value across the whole corpus.
std::pair<double, double> corpus_range(const Corpus& corpus);

// Builds the per-song trees over a BinSpec spanning the corpus amplitude
// range. Raises empty_corpus, invalid_argument (duplicate ids, bins == 0,
// levels > kMaxLevels), or signal_too_short naming the offending signal.
// The result is independent of the processing order (and of `threads`).
Index build_index(const Corpus& corpus, std::uint32_t bins, std::uint32_t levels,
                  unsigned threads = 1);

// Binary index container (documented in the README): magic "MRHX", u32
// version, JSON params block, per-song raw count records, CRC32 trailer.
// All integers little-endian. load_index(save_index(x)) == x.
void save_index(const Index& index, const std::filesystem::path& path);

// Raises bad_magic, bad_version, bad_checksum, or bad_format; never returns
// a partially loaded index.
Index load_index(const std::filesystem::path& path);

}  // namespace mrh
