#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrh/cascade.hpp"
#include "mrh/index.hpp"
#include "mrh/signal.hpp"

namespace mrh {

struct GroundTruth {
  std::map<std::string, std::string> pairs;  // query id -> target song id
};

// Retrieval metrics over 1-based target ranks. Queries whose target was
// pruned out of the final pool are not in these lists; evaluate() folds them
// in as zero-contribution entries (documented convention).
double mrr(std::span<const std::uint32_t> ranks);
double moa(std::span<const std::uint32_t> ranks, std::size_t corpus_size);
double top_x(std::span<const std::uint32_t> ranks, std::uint32_t x);

struct EvalReport {
  std::map<std::string, std::uint32_t> per_query_ranks;  // absent key = pruned away
  double mrr = 0.0;
  double moa = 0.0;
  std::map<std::uint32_t, double> top_x;
  std::size_t n_queries = 0;
  std::size_t corpus_size = 0;
  nlohmann::json params;  // build/cascade parameters the run used
};

// Derives a query corpus from song prefixes: each query is the leading
// `fraction` of a song's samples (floor of fraction * N, at least 1) plus
// seeded uniform noise at `noise_db` SNR; +infinity means clean (bitwise
// prefix). Ground truth maps every query to its source song. min_samples
// guards the level budget: a prefix shorter than it raises invalid_argument.
std::pair<Corpus, GroundTruth> synth_queries(const Corpus& corpus, std::uint64_t seed,
                                             std::uint32_t per_song, double fraction,
                                             double noise_db, std::size_t min_samples = 1);

// Runs the cascade for every query, extracts target ranks, and aggregates
// the metrics (pruned targets contribute zero). Raises unknown_target when a
// query lacks ground truth or a target is not in the index.
EvalReport evaluate(const Index& index, const Corpus& queries, const GroundTruth& truth,
                    const CascadeConfig& config, std::span<const std::uint32_t> xs,
                    unsigned threads = 1);

nlohmann::json to_json(const EvalReport& report);
std::string to_table(const EvalReport& report);

}  // namespace mrh
