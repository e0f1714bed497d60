#include "mrh/cascade.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mrh/parallel.hpp"

namespace mrh {

namespace {

void validate_config(const CascadeConfig& config, const Index& index) {
  if (config.stages.empty()) {
    raise(Errc::invalid_config, "cascade needs at least one stage");
  }
  std::uint32_t prev_level = 0;
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const StageSpec& stage = config.stages[i];
    if (stage.level > index.params.levels) {
      raise(Errc::invalid_config,
            "stage " + std::to_string(i + 1) + " level " + std::to_string(stage.level) +
                " exceeds index levels (" + std::to_string(index.params.levels) + ")");
    }
    if (i > 0 && stage.level < prev_level) {
      raise(Errc::invalid_config, "stage levels must be non-decreasing");
    }
    prev_level = stage.level;
    if (stage.prune.policy == PrunePolicy::quantile &&
        !(stage.prune.survival > 0.0 && stage.prune.survival <= 1.0)) {
      raise(Errc::invalid_config, "quantile survival rate must lie in (0, 1]");
    }
  }
  if (config.final_rank_level > index.params.levels) {
    raise(Errc::invalid_config,
          "final rank level " + std::to_string(config.final_rank_level) +
              " exceeds index levels (" + std::to_string(index.params.levels) + ")");
  }
}

// Depth of the query tree: enough levels to meet every stage at matching
// granularity, even against songs shorter than the query.
std::uint32_t query_tree_depth(const MusicSignal& query, const Index& index,
                               std::uint32_t needed) {
  std::uint64_t shortest = UINT64_MAX;
  for (const auto& [id, len] : index.song_lengths) {
    shortest = std::min(shortest, len);
  }
  std::uint32_t extra = 0;
  if (shortest < query.samples.size()) {
    const double ratio = static_cast<double>(query.samples.size()) / static_cast<double>(shortest);
    extra = static_cast<std::uint32_t>(std::max(0L, std::lround(std::log2(ratio))));
  }
  const auto fit = static_cast<std::uint32_t>(std::floor(std::log2(query.samples.size())));
  return std::min({needed + extra, fit, kMaxLevels});
}

MultiResHistogram build_query_tree(const MusicSignal& query, const Index& index,
                                   std::uint32_t needed) {
  const std::uint64_t min_len = std::uint64_t{1} << needed;
  if (query.samples.size() < min_len) {
    raise(Errc::signal_too_short,
          "query '" + query.id + "' has " + std::to_string(query.samples.size()) +
              " samples; the configured levels need at least " + std::to_string(min_len));
  }
  return build_mrh(std::span<const float>(query.samples), query.id, index.bin_spec(),
                   query_tree_depth(query, index, needed));
}

// Scores `pool` against the query at one level; results keyed by id.
std::map<std::string, double> score_pool(const MultiResHistogram& query_tree, const Index& index,
                                         const std::vector<std::string>& pool,
                                         std::uint32_t level, MatchMode mode, unsigned threads) {
  std::vector<double> scores(pool.size());
  parallel_for(pool.size(), threads, [&](std::size_t i) {
    scores[i] = match_level(query_tree, index.entries.at(pool[i]), level, mode).score;
  });
  std::map<std::string, double> by_id;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    by_id.emplace(pool[i], scores[i]);
  }
  return by_id;
}

std::vector<RankedSong> sort_ranking(std::vector<RankedSong> ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const RankedSong& a, const RankedSong& b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.id < b.id;
  });
  return ranking;
}

}  // namespace

std::string to_string(const PruneSpec& spec) {
  switch (spec.policy) {
    case PrunePolicy::paper_literal:
      return "paper-literal";
    case PrunePolicy::keep_high:
      return "keep-high";
    case PrunePolicy::quantile:
      return "quantile:" + std::to_string(spec.survival);
  }
  return "?";
}

PruneSpec prune_spec_from_string(const std::string& s) {
  if (s == "paper-literal" || s == "paper_literal") {
    return PruneSpec{PrunePolicy::paper_literal, 1.0};
  }
  if (s == "keep-high" || s == "keep_high") {
    return PruneSpec{PrunePolicy::keep_high, 1.0};
  }
  if (s.rfind("quantile:", 0) == 0) {
    double rate = 0.0;
    try {
      rate = std::stod(s.substr(9));
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "unparseable quantile rate in '" + s + "'");
    }
    if (!(rate > 0.0 && rate <= 1.0)) {
      raise(Errc::invalid_argument, "quantile survival rate must lie in (0, 1]");
    }
    return PruneSpec{PrunePolicy::quantile, rate};
  }
  raise(Errc::invalid_argument, "unknown prune policy '" + s + "'");
}

CascadeConfig default_cascade(std::uint32_t levels, MatchMode mode, const PruneSpec& prune) {
  CascadeConfig config;
  for (std::uint32_t level = 1; level <= levels; ++level) {
    config.stages.push_back(StageSpec{level, mode, prune});
  }
  if (levels == 0) {
    config.stages.push_back(StageSpec{0, mode, prune});
  }
  config.final_rank_level = config.stages.back().level;
  return config;
}

nlohmann::json config_to_json(const CascadeConfig& config) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageSpec& stage : config.stages) {
    stages.push_back({{"level", stage.level},
                      {"mode", to_string(stage.mode)},
                      {"prune", to_string(stage.prune)}});
  }
  return {{"stages", stages}, {"final_rank_level", config.final_rank_level}};
}

std::pair<double, double> thresholds(std::span<const double> scores) {
  if (scores.empty()) {
    raise(Errc::empty_scores, "cannot take thresholds of an empty score list");
  }
  // Extended-precision accumulation so boundary scores compare against the
  // mean the way exact arithmetic would (a score equal to the mean of itself
  // and symmetric neighbours must not fall outside the threshold).
  long double sum = 0.0L;
  for (double s : scores) {
    sum += s;
  }
  return {0.0, static_cast<double>(sum / static_cast<long double>(scores.size()))};
}

std::vector<std::string> prune(const std::vector<std::string>& pool,
                               const std::map<std::string, double>& scores,
                               const PruneSpec& policy) {
  std::vector<double> pool_scores;
  pool_scores.reserve(pool.size());
  for (const std::string& id : pool) {
    const auto it = scores.find(id);
    if (it == scores.end()) {
      raise(Errc::missing_score, "no score for pool member '" + id + "'");
    }
    pool_scores.push_back(it->second);
  }

  std::vector<std::string> survivors;
  if (policy.policy == PrunePolicy::quantile) {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pool_scores[a] != pool_scores[b]) {
        return pool_scores[a] > pool_scores[b];
      }
      return pool[a] < pool[b];
    });
    auto keep = static_cast<std::size_t>(std::ceil(policy.survival *
                                                   static_cast<double>(pool.size())));
    keep = std::clamp<std::size_t>(keep, 1, pool.size());
    std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<long>(keep));
    std::sort(kept.begin(), kept.end());  // back to id order
    for (std::size_t i : kept) {
      survivors.push_back(pool[i]);
    }
    return survivors;
  }

  const auto [t_lower, t_upper] = thresholds(pool_scores);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double s = pool_scores[i];
    const bool keep = policy.policy == PrunePolicy::paper_literal
                          ? (s >= t_lower && s <= t_upper)
                          : (s >= t_upper);
    if (keep) {
      survivors.push_back(pool[i]);
    }
  }
  if (survivors.empty()) {
    // Retention rule emptied the pool; keep the single best candidate under
    // the policy's own ordering.
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const bool better = policy.policy == PrunePolicy::paper_literal
                              ? pool_scores[i] < pool_scores[best]
                              : pool_scores[i] > pool_scores[best];
      if (better) {
        best = i;
      }
    }
    survivors.push_back(pool[best]);
  }
  return survivors;
}

CascadeResult run_cascade(const MusicSignal& query, const Index& index,
                          const CascadeConfig& config, unsigned threads) {
  validate_config(config, index);
  std::uint32_t needed = config.final_rank_level;
  for (const StageSpec& stage : config.stages) {
    needed = std::max(needed, stage.level);
  }
  const MultiResHistogram query_tree = build_query_tree(query, index, needed);

  CascadeResult result;
  result.query_id = query.id;

  std::vector<std::string> pool;
  pool.reserve(index.entries.size());
  for (const auto& [id, tree] : index.entries) {
    pool.push_back(id);
  }

  std::map<std::string, double> stage_scores;
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const StageSpec& stage = config.stages[i];
    const auto start = std::chrono::steady_clock::now();

    stage_scores = score_pool(query_tree, index, pool, stage.level, stage.mode, threads);
    std::vector<double> ordered;
    ordered.reserve(pool.size());
    for (const std::string& id : pool) {
      ordered.push_back(stage_scores.at(id));
    }
    const auto [t_lower, t_upper] = thresholds(ordered);
    std::vector<std::string> survivors = prune(pool, stage_scores, stage.prune);

    StageReport report;
    report.stage_index = static_cast<std::uint32_t>(i + 1);
    report.pool_in = pool.size();
    report.pool_out = survivors.size();
    report.threshold_lower = t_lower;
    report.threshold_upper = t_upper;
    report.achieved_survival =
        static_cast<double>(survivors.size()) / static_cast<double>(pool.size());
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    result.reports.push_back(report);
    pool = std::move(survivors);
  }

  // Final ranking at the configured level, reusing the last stage's scores
  // when it already ran at that level and mode.
  const StageSpec& last = config.stages.back();
  std::map<std::string, double> final_scores;
  if (last.level == config.final_rank_level) {
    final_scores = std::move(stage_scores);
  } else {
    final_scores = score_pool(query_tree, index, pool, config.final_rank_level, last.mode, threads);
  }

  std::vector<RankedSong> ranking;
  ranking.reserve(pool.size());
  for (const std::string& id : pool) {
    ranking.push_back(RankedSong{id, final_scores.at(id)});
  }
  result.ranking = sort_ranking(std::move(ranking));
  result.survivors.reserve(result.ranking.size());
  for (const RankedSong& song : result.ranking) {
    result.survivors.push_back(song.id);
  }
  return result;
}

std::vector<RankedSong> brute_force_rank(const MusicSignal& query, const Index& index,
                                         std::uint32_t level, MatchMode mode, unsigned threads) {
  if (level > index.params.levels) {
    raise(Errc::invalid_config,
          "level " + std::to_string(level) + " exceeds index levels (" +
              std::to_string(index.params.levels) + ")");
  }
  const MultiResHistogram query_tree = build_query_tree(query, index, level);

  std::vector<std::string> pool;
  pool.reserve(index.entries.size());
  for (const auto& [id, tree] : index.entries) {
    pool.push_back(id);
  }
  const auto scores = score_pool(query_tree, index, pool, level, mode, threads);

  std::vector<RankedSong> ranking;
  ranking.reserve(pool.size());
  for (const std::string& id : pool) {
    ranking.push_back(RankedSong{id, scores.at(id)});
  }
  return sort_ranking(std::move(ranking));
}

nlohmann::json to_json(const CascadeResult& result) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const RankedSong& song : result.ranking) {
    ranking.push_back({{"id", song.id}, {"score", song.score}});
  }
  nlohmann::json stages = nlohmann::json::array();
  for (const StageReport& report : result.reports) {
    stages.push_back({{"pool_in", report.pool_in},
                      {"pool_out", report.pool_out},
                      {"t_upper", report.threshold_upper},
                      {"survival", report.achieved_survival},
                      {"ms", report.wall_ms}});
  }
  return {{"query_id", result.query_id}, {"ranking", ranking}, {"stages", stages}};
}

}  // namespace mrh
