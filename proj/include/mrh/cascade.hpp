#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrh/index.hpp"
#include "mrh/similarity.hpp"

namespace mrh {

enum class PrunePolicy {
  paper_literal,  // keep scores in [T_lower, T_upper] (purges the high end)
  keep_high,      // keep scores >= T_upper
  quantile,       // keep the ceil(survival * n) highest-scoring candidates
};

struct PruneSpec {
  PrunePolicy policy = PrunePolicy::keep_high;
  double survival = 1.0;  // quantile only, in (0, 1]

  bool operator==(const PruneSpec&) const = default;
};

std::string to_string(const PruneSpec& spec);
// Accepts "paper-literal", "keep-high", or "quantile:<rate>".
PruneSpec prune_spec_from_string(const std::string& s);

struct StageSpec {
  std::uint32_t level = 0;
  MatchMode mode = MatchMode::best_match;
  PruneSpec prune;

  bool operator==(const StageSpec&) const = default;
};

struct CascadeConfig {
  std::vector<StageSpec> stages;       // levels non-decreasing
  std::uint32_t final_rank_level = 0;  // level used to order the final pool

  bool operator==(const CascadeConfig&) const = default;
};

// Coarse-to-fine default: one stage per level 1..levels, the given mode and
// policy at every stage, final ranking at the deepest level.
CascadeConfig default_cascade(std::uint32_t levels, MatchMode mode, const PruneSpec& prune);

nlohmann::json config_to_json(const CascadeConfig& config);

struct StageReport {
  std::uint32_t stage_index = 0;  // 1-based
  std::size_t pool_in = 0;
  std::size_t pool_out = 0;
  double threshold_lower = 0.0;
  double threshold_upper = 0.0;
  double achieved_survival = 0.0;
  double wall_ms = 0.0;
};

struct RankedSong {
  std::string id;
  double score = 0.0;

  bool operator==(const RankedSong&) const = default;
};

struct CascadeResult {
  std::string query_id;
  std::vector<RankedSong> ranking;  // score descending, ties by id ascending
  std::vector<StageReport> reports;
  std::vector<std::string> survivors;  // same ids as ranking, same order
};

// Retention interval per the mean rule: lower limit 0, upper limit the
// arithmetic mean. Raises empty_scores on an empty list.
std::pair<double, double> thresholds(std::span<const double> scores);

// Applies the policy; always retains at least one id (the best under the
// policy's own ordering when the rule would empty the pool). Survivors come
// back in ascending id order. Raises missing_score when a pool member has no
// score.
std::vector<std::string> prune(const std::vector<std::string>& pool,
                               const std::map<std::string, double>& scores,
                               const PruneSpec& policy);

// Runs the progressive-filtering pipeline: per-stage scoring of the
// surviving pool, mean thresholds recomputed over that pool, pruning, then a
// final ranking of the survivors at final_rank_level (using the last stage's
// match mode). Raises invalid_config or signal_too_short (message states the
// minimum query length).
CascadeResult run_cascade(const MusicSignal& query, const Index& index,
                          const CascadeConfig& config, unsigned threads = 1);

// Exhaustive scan: scores every indexed song at `level` and sorts. The
// reference the cascade is checked against.
std::vector<RankedSong> brute_force_rank(const MusicSignal& query, const Index& index,
                                         std::uint32_t level, MatchMode mode,
                                         unsigned threads = 1);

// {query_id, ranking:[{id, score}], stages:[{pool_in, pool_out, t_upper,
// survival, ms}]}
nlohmann::json to_json(const CascadeResult& result);

}  // namespace mrh
