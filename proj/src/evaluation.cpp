#include "mrh/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mrh/parallel.hpp"
#include "mrh/rng.hpp"

namespace mrh {

double mrr(std::span<const std::uint32_t> ranks) {
  if (ranks.empty()) {
    raise(Errc::empty_scores, "mrr over an empty rank list");
  }
  double sum = 0.0;
  for (std::uint32_t r : ranks) {
    if (r == 0) {
      raise(Errc::invalid_rank, "ranks are 1-based");
    }
    sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(ranks.size());
}

double moa(std::span<const std::uint32_t> ranks, std::size_t corpus_size) {
  if (ranks.empty()) {
    raise(Errc::empty_scores, "moa over an empty rank list");
  }
  if (corpus_size < 2) {
    raise(Errc::invalid_argument, "moa needs a corpus of at least 2 songs");
  }
  double sum = 0.0;
  for (std::uint32_t r : ranks) {
    if (r == 0 || r > corpus_size) {
      raise(Errc::invalid_rank,
            "rank " + std::to_string(r) + " outside [1, " + std::to_string(corpus_size) + "]");
    }
    sum += static_cast<double>(corpus_size - r) / static_cast<double>(corpus_size - 1);
  }
  return sum / static_cast<double>(ranks.size());
}

double top_x(std::span<const std::uint32_t> ranks, std::uint32_t x) {
  if (ranks.empty()) {
    raise(Errc::empty_scores, "top_x over an empty rank list");
  }
  if (x == 0) {
    raise(Errc::invalid_argument, "x must be at least 1");
  }
  std::size_t hits = 0;
  for (std::uint32_t r : ranks) {
    if (r == 0) {
      raise(Errc::invalid_rank, "ranks are 1-based");
    }
    if (r <= x) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

std::pair<Corpus, GroundTruth> synth_queries(const Corpus& corpus, std::uint64_t seed,
                                             std::uint32_t per_song, double fraction,
                                             double noise_db, std::size_t min_samples) {
  if (corpus.signals.empty()) {
    raise(Errc::empty_corpus, "cannot derive queries from an empty corpus");
  }
  if (per_song == 0) {
    raise(Errc::invalid_argument, "per_song must be at least 1");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    raise(Errc::invalid_argument, "fraction must lie in (0, 1]");
  }

  Corpus queries;
  GroundTruth truth;
  SplitMix64 master(seed);
  for (const MusicSignal& song : corpus.signals) {
    const auto q_len = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(song.length()))));
    if (q_len < min_samples) {
      raise(Errc::invalid_argument,
            "fraction " + std::to_string(fraction) + " of '" + song.id + "' gives " +
                std::to_string(q_len) + " samples; the level budget needs " +
                std::to_string(min_samples));
    }
    for (std::uint32_t j = 0; j < per_song; ++j) {
      SplitMix64 rng(master.next());  // one stream per query, drawn in fixed order
      MusicSignal q;
      q.id = song.id + "-q" + std::to_string(j);
      q.sample_rate = song.sample_rate;
      q.samples.assign(song.samples.begin(),
                       song.samples.begin() + static_cast<long>(q_len));
      if (std::isfinite(noise_db)) {
        double power = 0.0;
        for (float s : q.samples) {
          power += static_cast<double>(s) * static_cast<double>(s);
        }
        power /= static_cast<double>(q_len);
        if (power > 0.0) {
          // Uniform noise in [-a, a] has power a^2/3; pick a for the target SNR.
          const double noise_power = power / std::pow(10.0, noise_db / 10.0);
          const double amp = std::sqrt(3.0 * noise_power);
          for (float& s : q.samples) {
            const double v = static_cast<double>(s) + amp * rng.uniform(-1.0, 1.0);
            s = static_cast<float>(std::clamp(v, -1.0, 1.0));
          }
        }
      }
      truth.pairs[q.id] = song.id;
      queries.signals.push_back(std::move(q));
    }
  }
  return {std::move(queries), truth};
}

EvalReport evaluate(const Index& index, const Corpus& queries, const GroundTruth& truth,
                    const CascadeConfig& config, std::span<const std::uint32_t> xs,
                    unsigned threads) {
  if (queries.signals.empty()) {
    raise(Errc::invalid_argument, "no queries to evaluate");
  }
  if (index.size() < 2) {
    raise(Errc::invalid_argument, "evaluation needs an index of at least 2 songs");
  }
  for (const auto& [query_id, target_id] : truth.pairs) {
    if (!index.entries.contains(target_id)) {
      raise(Errc::unknown_target,
            "ground truth maps '" + query_id + "' to '" + target_id +
                "', which is not in the index");
    }
  }
  for (const MusicSignal& q : queries.signals) {
    if (!truth.pairs.contains(q.id)) {
      raise(Errc::unknown_target, "query '" + q.id + "' has no ground-truth target");
    }
  }

  // Rank of the target in each query's final ranking; 0 marks "pruned away".
  std::vector<std::uint32_t> ranks(queries.signals.size(), 0);
  parallel_for(queries.signals.size(), threads, [&](std::size_t i) {
    const MusicSignal& q = queries.signals[i];
    const CascadeResult result = run_cascade(q, index, config, 1);
    const std::string& target = truth.pairs.at(q.id);
    for (std::size_t pos = 0; pos < result.ranking.size(); ++pos) {
      if (result.ranking[pos].id == target) {
        ranks[i] = static_cast<std::uint32_t>(pos + 1);
        break;
      }
    }
  });

  EvalReport report;
  report.n_queries = queries.signals.size();
  report.corpus_size = index.size();
  const auto q_count = static_cast<double>(report.n_queries);
  const auto m = static_cast<double>(report.corpus_size);

  double rr_sum = 0.0;
  double moa_sum = 0.0;
  std::map<std::uint32_t, std::size_t> hits;
  for (std::uint32_t x : xs) {
    if (x == 0) {
      raise(Errc::invalid_argument, "x must be at least 1");
    }
    hits[x] = 0;
  }
  for (std::size_t i = 0; i < queries.signals.size(); ++i) {
    const std::uint32_t r = ranks[i];
    if (r == 0) {
      continue;  // pruned target: contributes zero everywhere
    }
    report.per_query_ranks[queries.signals[i].id] = r;
    rr_sum += 1.0 / static_cast<double>(r);
    moa_sum += (m - static_cast<double>(r)) / (m - 1.0);
    for (auto& [x, count] : hits) {
      if (r <= x) {
        ++count;
      }
    }
  }
  report.mrr = rr_sum / q_count;
  report.moa = moa_sum / q_count;
  for (const auto& [x, count] : hits) {
    report.top_x[x] = static_cast<double>(count) / q_count;
  }

  report.params = {{"bins", index.params.bins},
                   {"levels", index.params.levels},
                   {"min_amp", index.params.min_amp},
                   {"max_amp", index.params.max_amp},
                   {"cascade", config_to_json(config)},
                   {"xs", std::vector<std::uint32_t>(xs.begin(), xs.end())}};
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json ranks = nlohmann::json::object();
  for (const auto& [id, rank] : report.per_query_ranks) {
    ranks[id] = rank;
  }
  nlohmann::json tops = nlohmann::json::object();
  for (const auto& [x, rate] : report.top_x) {
    tops[std::to_string(x)] = rate;
  }
  return {{"mrr", report.mrr},
          {"moa", report.moa},
          {"top_x", tops},
          {"per_query_ranks", ranks},
          {"n_queries", report.n_queries},
          {"corpus_size", report.corpus_size},
          {"params", report.params}};
}

std::string to_table(const EvalReport& report) {
  char line[64];
  std::string out;
  std::snprintf(line, sizeof(line), "%-12s %8zu\n", "queries", report.n_queries);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %8zu\n", "songs", report.corpus_size);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %8.4f\n", "MRR", report.mrr);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %8.4f\n", "MoA", report.moa);
  out += line;
  for (const auto& [x, rate] : report.top_x) {
    std::snprintf(line, sizeof(line), "Top-%-8u %8.4f\n", x, rate);
    out += line;
  }
  return out;
}

}  // namespace mrh
