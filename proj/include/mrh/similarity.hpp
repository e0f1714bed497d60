#pragma once

#include <cstdint>
#include <string>

#include "mrh/histogram.hpp"
#include "mrh/mrh_tree.hpp"

namespace mrh {

enum class MatchMode {
  aligned,     // position p of the query scores against position p of the song
  best_match,  // each query position takes its best-scoring song position
};

std::string to_string(MatchMode mode);
MatchMode match_mode_from_string(const std::string& s);

struct LevelScore {
  std::uint32_t level = 0;      // song-tree level the comparison ran at
  double score = 0.0;           // in [0, 1]
  std::int32_t best_offset = -1;  // best song segment for query position 0 (best_match only)
};

// Euclidean distance between mass vectors; in [0, sqrt(2)] for normalized
// inputs. Raises spec_mismatch on differing bin counts.
double euclidean(const NormalizedHistogram& a, const NormalizedHistogram& b);

// Sum of absolute count differences. Exact in integers; raises spec_mismatch
// on differing bin counts.
double l1_distance(const Histogram& a, const Histogram& b);

// Histogram intersection scaled by (sqrt(2) - d) / sqrt(2), where d is the
// Euclidean distance over the same bins. 1 for identical normalized
// histograms, 0 for disjoint supports; symmetric; clamped into [0, 1].
double mrhd(const NormalizedHistogram& a, const NormalizedHistogram& b);

// Scores the query tree against a song tree at the song's `level`.
//
// The query side is compared at the level whose segment granularity matches
// the song's: when the signals differ in length, the query level is shifted
// by round(log2(song_len / query_len)) and clamped to the query tree, so a
// query that is a bitwise copy of some song segment meets that segment at
// equal granularity and scores 1.0 under best_match. Equal-length signals
// compare level-for-level.
//
// aligned averages mrhd over matching positions and requires equal segment
// counts (segment_count_mismatch otherwise); best_match averages, over query
// positions, the best mrhd across all song positions, and reports the argmax
// song position for query position 0 (ties to the smallest index). Raises
// level_out_of_range when the requested level is absent.
LevelScore match_level(const MultiResHistogram& query, const MultiResHistogram& song,
                       std::uint32_t level, MatchMode mode);

}  // namespace mrh
