#include "mrh/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrh {

namespace {

void require_same_bins(std::size_t a, std::size_t b) {
  if (a != b) {
    raise(Errc::spec_mismatch,
          "histograms disagree on bin count (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
  }
}

// Query level whose segment granularity matches the song's at `level`.
std::uint32_t granularity_level(const MultiResHistogram& query, const MultiResHistogram& song,
                                std::uint32_t level) {
  const double ratio =
      static_cast<double>(song.signal_length()) / static_cast<double>(query.signal_length());
  const long shift = std::lround(std::log2(ratio));
  const long raw = static_cast<long>(level) - shift;
  return static_cast<std::uint32_t>(std::clamp(raw, 0L, static_cast<long>(query.depth())));
}

}  // namespace

std::string to_string(MatchMode mode) {
  return mode == MatchMode::aligned ? "aligned" : "best-match";
}

MatchMode match_mode_from_string(const std::string& s) {
  if (s == "aligned") {
    return MatchMode::aligned;
  }
  if (s == "best-match" || s == "best_match") {
    return MatchMode::best_match;
  }
  raise(Errc::invalid_argument, "unknown match mode '" + s + "'");
}

double euclidean(const NormalizedHistogram& a, const NormalizedHistogram& b) {
  require_same_bins(a.mass.size(), b.mass.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    const double d = a.mass[i] - b.mass[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double l1_distance(const Histogram& a, const Histogram& b) {
  require_same_bins(a.counts.size(), b.counts.size());
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    sum += a.counts[i] > b.counts[i] ? a.counts[i] - b.counts[i] : b.counts[i] - a.counts[i];
  }
  return static_cast<double>(sum);
}

double mrhd(const NormalizedHistogram& a, const NormalizedHistogram& b) {
  require_same_bins(a.mass.size(), b.mass.size());
  double intersection = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    intersection += std::min(a.mass[i], b.mass[i]);
    const double d = a.mass[i] - b.mass[i];
    sq += d * d;
  }
  const double dist = std::sqrt(sq);
  const double shape = std::max(0.0, std::numbers::sqrt2 - dist) / std::numbers::sqrt2;
  return std::clamp(intersection * shape, 0.0, 1.0);
}

LevelScore match_level(const MultiResHistogram& query, const MultiResHistogram& song,
                       std::uint32_t level, MatchMode mode) {
  require_same_bins(query.spec.bins, song.spec.bins);
  if (level >= song.level_count()) {
    raise(Errc::level_out_of_range,
          "level " + std::to_string(level) + " absent from song tree '" + song.song_id + "'");
  }
  if (query.signal_length() == song.signal_length() && level >= query.level_count()) {
    raise(Errc::level_out_of_range,
          "level " + std::to_string(level) + " absent from query tree '" + query.song_id + "'");
  }

  const std::uint32_t q_level = granularity_level(query, song, level);
  const auto& q_nodes = query.levels[q_level];
  const auto& s_nodes = song.levels[level];

  LevelScore result;
  result.level = level;

  if (mode == MatchMode::aligned) {
    if (q_nodes.size() != s_nodes.size()) {
      raise(Errc::segment_count_mismatch,
            "aligned mode needs equal segment counts; query has " +
                std::to_string(q_nodes.size()) + ", song has " + std::to_string(s_nodes.size()));
    }
    double sum = 0.0;
    for (std::size_t p = 0; p < q_nodes.size(); ++p) {
      sum += mrhd(q_nodes[p].norm, s_nodes[p].norm);
    }
    result.score = sum / static_cast<double>(q_nodes.size());
    result.best_offset = -1;
    return result;
  }

  double sum = 0.0;
  for (std::size_t p = 0; p < q_nodes.size(); ++p) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < s_nodes.size(); ++k) {
      const double s = mrhd(q_nodes[p].norm, s_nodes[k].norm);
      if (s > best) {  // ties keep the smallest segment index
        best = s;
        best_k = k;
      }
    }
    sum += best;
    if (p == 0) {
      result.best_offset = static_cast<std::int32_t>(best_k);
    }
  }
  result.score = sum / static_cast<double>(q_nodes.size());
  return result;
}

}  // namespace mrh
