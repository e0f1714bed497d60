#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrh/histogram.hpp"
#include "mrh/signal.hpp"

namespace mrh {

// Maximum tree depth accepted by builders (2^12 leaf segments).
inline constexpr std::uint32_t kMaxLevels = 12;

// One node of the multiresolution tree: the raw integer histogram of a
// dyadic segment plus its mass-normalized form.
struct MrhNode {
  Histogram raw;
  NormalizedHistogram norm;

  bool operator==(const MrhNode&) const = default;
};

// Per-signal dyadic tree of histograms. levels[j] holds the 2^j nodes of
// level j in segment-position order; the raw counts of node (j, p) equal the
// elementwise sum of nodes (j+1, 2p) and (j+1, 2p+1).
struct MultiResHistogram {
  std::string song_id;
  BinSpec spec;
  std::vector<std::vector<MrhNode>> levels;

  std::uint32_t level_count() const { return static_cast<std::uint32_t>(levels.size()); }
  std::uint32_t depth() const { return level_count() - 1; }
  // Length of the signal the tree was built from (level-0 sample count).
  std::uint64_t signal_length() const { return levels.front().front().raw.total; }
  std::size_t node_count() const;

  bool operator==(const MultiResHistogram&) const = default;
};

// Histograms every dyadic segment of the signal down to `levels`. Raises
// signal_too_short (naming the signal) when its length is below 2^levels, and
// invalid_argument when levels exceeds kMaxLevels.
MultiResHistogram build_mrh(const MusicSignal& signal, const BinSpec& spec, std::uint32_t levels);

// Same, over a raw sample view (used for query snippets).
MultiResHistogram build_mrh(std::span<const float> samples, const std::string& id,
                            const BinSpec& spec, std::uint32_t levels);

}  // namespace mrh
