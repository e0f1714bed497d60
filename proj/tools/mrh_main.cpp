// Command-line front end: corpus synthesis, index build, single query,
// evaluation sweep. Exit codes: 0 success, 1 runtime/data error, 2 usage
// error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrh/cascade.hpp"
#include "mrh/evaluation.hpp"
#include "mrh/histogram.hpp"
#include "mrh/index.hpp"
#include "mrh/manifest.hpp"
#include "mrh/parallel.hpp"
#include "mrh/signal.hpp"
#include "mrh/wav.hpp"

namespace fs = std::filesystem;

namespace {

// MRH_THREADS caps worker parallelism; 0 or unset means one worker per
// hardware thread. Results never depend on the worker count.
unsigned worker_threads() {
  const char* env = std::getenv("MRH_THREADS");
  if (env == nullptr || *env == '\0') {
    return mrh::resolve_threads(0);
  }
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0') {
    return 1;
  }
  return mrh::resolve_threads(static_cast<unsigned>(v));
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  std::uint32_t count = 0;
  std::uint32_t length = 0;
  std::uint32_t rate = 8000;
  double noise_amp = 0.1;
  std::string out_dir;
  // optional derived query corpus
  std::string queries_out;
  double fraction = 0.5;
  std::uint32_t per_song = 1;
  double noise_db = std::numeric_limits<double>::infinity();
};

int run_synth(const SynthArgs& args) {
  const mrh::Corpus corpus =
      mrh::synth_corpus(args.seed, args.count, args.length, args.rate, args.noise_amp);

  fs::create_directories(args.out_dir);
  std::vector<mrh::ManifestEntry> entries;
  for (const mrh::MusicSignal& sig : corpus.signals) {
    const std::string file = sig.id + ".wav";
    mrh::save_wav(fs::path(args.out_dir) / file, sig, 16);
    entries.push_back({sig.id, file});  // relative: the corpus dir stays relocatable
  }
  mrh::write_manifest(fs::path(args.out_dir) / "manifest.jsonl", entries);
  std::cout << "wrote " << corpus.size() << " signals and manifest.jsonl to " << args.out_dir
            << "\n";

  if (!args.queries_out.empty()) {
    const auto [queries, truth] =
        mrh::synth_queries(corpus, args.seed, args.per_song, args.fraction, args.noise_db);
    fs::create_directories(args.queries_out);
    std::vector<mrh::ManifestEntry> query_entries;
    for (const mrh::MusicSignal& q : queries.signals) {
      const std::string file = q.id + ".wav";
      mrh::save_wav(fs::path(args.queries_out) / file, q, 16);
      query_entries.push_back({q.id, file});
    }
    mrh::write_manifest(fs::path(args.queries_out) / "manifest.jsonl", query_entries);
    mrh::write_ground_truth(fs::path(args.queries_out) / "truth.jsonl", truth);
    std::cout << "wrote " << queries.size() << " queries, manifest.jsonl and truth.jsonl to "
              << args.queries_out << "\n";
  }
  return 0;
}

struct IndexArgs {
  std::string manifest;
  std::uint32_t bins = 0;
  double bin_width = 0.0;
  bool width_given = false;
  std::uint32_t levels = 3;
  std::string out;
};

int run_index(const IndexArgs& args) {
  const mrh::Corpus corpus = mrh::load_corpus(args.manifest);
  std::uint32_t bins = args.bins;
  if (args.width_given) {
    const auto [lo, hi] = mrh::corpus_range(corpus);
    bins = mrh::bin_count(lo, hi, args.bin_width);
  }
  const mrh::Index index = mrh::build_index(corpus, bins, args.levels, worker_threads());
  mrh::save_index(index, args.out);
  std::printf("indexed M=%zu t=%u levels=%u min_D=%.9g max_D=%.9g -> %s\n", index.size(),
              index.params.bins, index.params.levels, index.params.min_amp,
              index.params.max_amp, args.out.c_str());
  return 0;
}

struct QueryArgs {
  std::string index_path;
  std::string query_path;
  std::string prune_mode = "keep-high";
  std::string match_mode = "best-match";
  std::uint32_t stages = 0;  // 0: one stage per index level
  std::uint32_t top = 10;
  bool json = false;
  bool brute_force = false;
};

mrh::CascadeConfig config_from_flags(const mrh::Index& index, const std::string& prune_mode,
                                     const std::string& match_mode, std::uint32_t stages) {
  const mrh::PruneSpec prune = mrh::prune_spec_from_string(prune_mode);
  const mrh::MatchMode mode = mrh::match_mode_from_string(match_mode);
  const std::uint32_t count = stages == 0 ? index.params.levels : stages;
  mrh::CascadeConfig config;
  for (std::uint32_t level = 1; level <= count; ++level) {
    config.stages.push_back(mrh::StageSpec{level, mode, prune});
  }
  if (config.stages.empty()) {
    config.stages.push_back(mrh::StageSpec{0, mode, prune});
  }
  config.final_rank_level = config.stages.back().level;
  return config;
}

void print_ranking(const std::vector<mrh::RankedSong>& ranking, std::uint32_t top) {
  std::printf("%-5s %-24s %s\n", "rank", "id", "score");
  for (std::size_t i = 0; i < ranking.size() && i < top; ++i) {
    std::printf("%-5zu %-24s %.6f\n", i + 1, ranking[i].id.c_str(), ranking[i].score);
  }
}

int run_query(const QueryArgs& args) {
  const mrh::Index index = mrh::load_index(args.index_path);
  const mrh::MusicSignal query = mrh::load_wav(args.query_path);
  const mrh::CascadeConfig config =
      config_from_flags(index, args.prune_mode, args.match_mode, args.stages);

  if (args.brute_force) {
    const auto ranking =
        mrh::brute_force_rank(query, index, config.final_rank_level,
                              mrh::match_mode_from_string(args.match_mode), worker_threads());
    mrh::CascadeResult result;
    result.query_id = query.id;
    result.ranking = ranking;
    for (const auto& song : ranking) {
      result.survivors.push_back(song.id);
    }
    if (args.json) {
      std::cout << mrh::to_json(result).dump(2) << "\n";
    } else {
      print_ranking(ranking, args.top);
    }
    return 0;
  }

  const mrh::CascadeResult result = mrh::run_cascade(query, index, config, worker_threads());
  if (args.json) {
    std::cout << mrh::to_json(result).dump(2) << "\n";
    return 0;
  }
  print_ranking(result.ranking, args.top);
  std::printf("\n%-6s %-6s %-8s %-9s %-9s %-9s %s\n", "stage", "level", "pool_in", "pool_out",
              "t_upper", "survival", "ms");
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const mrh::StageReport& r = result.reports[i];
    std::printf("%-6u %-6u %-8zu %-9zu %-9.4f %-9.4f %.2f\n", r.stage_index,
                config.stages[i].level, r.pool_in, r.pool_out, r.threshold_upper,
                r.achieved_survival, r.wall_ms);
  }
  return 0;
}

struct EvalArgs {
  std::string index_path;
  std::string queries_manifest;
  std::string truth_path;
  std::string prune_mode = "keep-high";
  std::string match_mode = "best-match";
  std::uint32_t stages = 0;
  std::vector<std::uint32_t> xs = {1, 5, 10, 20};
  std::string report_path;
};

int run_eval(const EvalArgs& args) {
  const mrh::Index index = mrh::load_index(args.index_path);
  const mrh::Corpus queries = mrh::load_corpus(args.queries_manifest);
  const mrh::GroundTruth truth = mrh::read_ground_truth(args.truth_path);
  if (truth.pairs.empty()) {
    return usage_error("ground-truth file '" + args.truth_path + "' is empty");
  }
  const mrh::CascadeConfig config =
      config_from_flags(index, args.prune_mode, args.match_mode, args.stages);

  const mrh::EvalReport report =
      mrh::evaluate(index, queries, truth, config, args.xs, worker_threads());
  std::cout << mrh::to_table(report);
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path, std::ios::trunc);
    if (!out) {
      mrh::raise(mrh::Errc::io_failure, "cannot write '" + args.report_path + "'");
    }
    out << mrh::to_json(report).dump(2) << "\n";
    std::cout << "report written to " << args.report_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"similarity search over multiresolution amplitude histograms"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file mirroring the flags (section per subcommand)");
  // Let --config appear after the subcommand name as well.
  app.fallthrough();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--count", synth.count, "number of signals")->required();
  synth_cmd->add_option("--length", synth.length, "samples per signal")->required();
  synth_cmd->add_option("--rate", synth.rate, "sample rate in Hz");
  synth_cmd->add_option("--noise-amp", synth.noise_amp, "uniform noise amplitude");
  synth_cmd->add_option("--out-dir", synth.out_dir, "directory for WAVs and manifest.jsonl")
      ->required();
  synth_cmd->add_option("--queries-out", synth.queries_out,
                        "also derive prefix queries with manifest and truth into this directory");
  synth_cmd->add_option("--fraction", synth.fraction, "prefix fraction for derived queries");
  synth_cmd->add_option("--per-song", synth.per_song, "derived queries per song");
  synth_cmd->add_option("--noise-db", synth.noise_db, "query SNR in dB (inf = clean)");

  IndexArgs index_args;
  CLI::App* index_cmd = app.add_subcommand("index", "build and save an index from a manifest");
  index_cmd->add_option("--manifest", index_args.manifest, "corpus manifest (JSONL)")->required();
  auto* bins_opt = index_cmd->add_option("--bins", index_args.bins, "histogram bin count");
  auto* width_opt =
      index_cmd->add_option("--bin-width", index_args.bin_width, "derive the bin count from a width");
  bins_opt->excludes(width_opt);
  width_opt->excludes(bins_opt);
  index_cmd->add_option("--levels", index_args.levels, "tree depth");
  index_cmd->add_option("--out", index_args.out, "index file to write")->required();

  QueryArgs query_args;
  CLI::App* query_cmd = app.add_subcommand("query", "rank indexed songs against a query WAV");
  query_cmd->add_option("--index", query_args.index_path, "index file")->required();
  query_cmd->add_option("--query", query_args.query_path, "query WAV")->required();
  query_cmd->add_option("--prune-mode", query_args.prune_mode,
                        "paper-literal | keep-high | quantile:<rate>");
  query_cmd->add_option("--match-mode", query_args.match_mode, "aligned | best-match");
  query_cmd->add_option("--stages", query_args.stages, "stage count (0 = one per index level)");
  query_cmd->add_option("--top", query_args.top, "rows of the ranking to print");
  query_cmd->add_flag("--json", query_args.json, "emit the full result as JSON");
  query_cmd->add_flag("--brute-force", query_args.brute_force)->group("");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a query corpus against ground truth");
  eval_cmd->add_option("--index", eval_args.index_path, "index file")->required();
  eval_cmd->add_option("--queries", eval_args.queries_manifest, "query manifest (JSONL)")
      ->required();
  eval_cmd->add_option("--truth", eval_args.truth_path, "ground truth (JSONL)")->required();
  eval_cmd->add_option("--prune-mode", eval_args.prune_mode,
                       "paper-literal | keep-high | quantile:<rate>");
  eval_cmd->add_option("--match-mode", eval_args.match_mode, "aligned | best-match");
  eval_cmd->add_option("--stages", eval_args.stages, "stage count (0 = one per index level)");
  eval_cmd->add_option("--xs", eval_args.xs, "top-X cutoffs")->delimiter(',');
  eval_cmd->add_option("--report", eval_args.report_path, "write the report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      return run_synth(synth);
    }
    if (index_cmd->parsed()) {
      if (!*bins_opt && !*width_opt) {
        return usage_error("index needs exactly one of --bins or --bin-width");
      }
      index_args.width_given = static_cast<bool>(*width_opt);
      return run_index(index_args);
    }
    if (query_cmd->parsed()) {
      return run_query(query_args);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_args);
    }
  } catch (const mrh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return usage_error("no subcommand given");
}
