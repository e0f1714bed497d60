#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrh/histogram.hpp"
#include "mrh/index.hpp"
#include "mrh/wav.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run_cli(const std::string& args, const std::string& env = "") {
  const fs::path dir = test_dir("cli");
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + MRH_CLI_PATH + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = (status >= 0) ? ((status >> 8) & 0xFF) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// One corpus + index + query set, built once through the CLI itself.
struct CliFixture {
  fs::path corpus_dir = test_dir("cli") / "corpus";
  fs::path queries_dir = test_dir("cli") / "queries";
  fs::path index_path = test_dir("cli") / "corpus.mrhx";

  CliFixture() {
    const CliRun synth =
        run_cli("synth --seed 42 --count 10 --length 4096 --rate 8000 --out-dir " +
                corpus_dir.string() + " --queries-out " + queries_dir.string() +
                " --fraction 0.5 --per-song 1");
    REQUIRE(synth.exit_code == 0);
    const CliRun index = run_cli("index --manifest " + (corpus_dir / "manifest.jsonl").string() +
                                 " --bins 200 --levels 3 --out " + index_path.string());
    REQUIRE_MESSAGE(index.exit_code == 0, index.err);
  }
};

const CliFixture& fixture() {
  static const CliFixture f;
  return f;
}

}  // namespace

TEST_CASE("synth writes the promised files and is byte-reproducible") {
  const CliFixture& f = fixture();
  std::size_t wavs = 0;
  for (const auto& entry : fs::directory_iterator(f.corpus_dir)) {
    wavs += entry.path().extension() == ".wav" ? 1 : 0;
  }
  CHECK(wavs == 10);
  CHECK(fs::exists(f.corpus_dir / "manifest.jsonl"));
  CHECK(fs::exists(f.queries_dir / "manifest.jsonl"));
  CHECK(fs::exists(f.queries_dir / "truth.jsonl"));

  const fs::path again = test_dir("cli") / "corpus_again";
  const CliRun rerun = run_cli("synth --seed 42 --count 10 --length 4096 --rate 8000 --out-dir " +
                               again.string());
  REQUIRE(rerun.exit_code == 0);
  CHECK(slurp(again / "synth-0003.wav") == slurp(f.corpus_dir / "synth-0003.wav"));
  CHECK(slurp(again / "manifest.jsonl") == slurp(f.corpus_dir / "manifest.jsonl"));
}

TEST_CASE("synth without --out-dir is a usage error") {
  CHECK(run_cli("synth --seed 1 --count 2 --length 64").exit_code == 2);
}

TEST_CASE("index echoes its parameters") {
  const CliFixture& f = fixture();
  const CliRun r = run_cli("index --manifest " + (f.corpus_dir / "manifest.jsonl").string() +
                           " --bins 200 --levels 3 --out " +
                           (test_dir("cli") / "echo.mrhx").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("M=10") != std::string::npos);
  CHECK(r.out.find("t=200") != std::string::npos);
  CHECK(r.out.find("levels=3") != std::string::npos);
  CHECK(r.out.find("min_D=") != std::string::npos);
  CHECK(r.out.find("max_D=") != std::string::npos);
}

TEST_CASE("index derives the bin count from a width") {
  const CliFixture& f = fixture();
  const fs::path out = test_dir("cli") / "width.mrhx";
  const CliRun r = run_cli("index --manifest " + (f.corpus_dir / "manifest.jsonl").string() +
                           " --bin-width 0.01 --levels 2 --out " + out.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  const mrh::Index index = mrh::load_index(out);
  CHECK(index.params.bins ==
        mrh::bin_count(index.params.min_amp, index.params.max_amp, 0.01));
}

TEST_CASE("index insists on exactly one of --bins and --bin-width") {
  const CliFixture& f = fixture();
  const std::string manifest = (f.corpus_dir / "manifest.jsonl").string();
  const std::string out = (test_dir("cli") / "reject.mrhx").string();
  CHECK(run_cli("index --manifest " + manifest + " --bins 10 --bin-width 0.1 --out " + out)
            .exit_code == 2);
  CHECK(run_cli("index --manifest " + manifest + " --out " + out).exit_code == 2);
}

TEST_CASE("query ranks the source of a clean prefix first") {
  const CliFixture& f = fixture();
  const std::string query_wav = (f.queries_dir / "synth-0004-q0.wav").string();
  const CliRun r = run_cli("query --index " + f.index_path.string() + " --query " + query_wav +
                           " --prune-mode keep-high --match-mode best-match --json");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("ranking")[0].at("id") == "synth-0004");
  CHECK(j.at("stages").size() == 3);
}

TEST_CASE("an unpruned cascade matches the brute-force scan") {
  const CliFixture& f = fixture();
  const std::string query_wav = (f.queries_dir / "synth-0007-q0.wav").string();
  for (const char* stages : {"", " --stages 1"}) {
    const std::string base = "query --index " + f.index_path.string() + " --query " + query_wav +
                             " --match-mode best-match --json" + stages;
    const CliRun cascade = run_cli(base + " --prune-mode quantile:1.0");
    const CliRun oracle = run_cli(base + " --brute-force");
    REQUIRE(cascade.exit_code == 0);
    REQUIRE(oracle.exit_code == 0);

    const auto jc = nlohmann::json::parse(cascade.out).at("ranking");
    const auto jo = nlohmann::json::parse(oracle.out).at("ranking");
    REQUIRE(jc.size() == jo.size());
    for (std::size_t i = 0; i < jc.size(); ++i) {
      CHECK(jc[i].at("id") == jo[i].at("id"));
    }
  }
}

TEST_CASE("query failures use exit code 1 with a telling message") {
  const CliFixture& f = fixture();

  // Corrupt the index magic.
  const fs::path broken = test_dir("cli") / "broken.mrhx";
  std::string bytes = slurp(f.index_path);
  bytes[0] = 'Z';
  std::ofstream(broken, std::ios::binary).write(bytes.data(), static_cast<long>(bytes.size()));

  const std::string query_wav = (f.queries_dir / "synth-0004-q0.wav").string();
  const CliRun bad_magic =
      run_cli("query --index " + broken.string() + " --query " + query_wav);
  CHECK(bad_magic.exit_code == 1);
  CHECK(bad_magic.err.find("bad magic") != std::string::npos);

  // A query shorter than the level budget.
  mrh::MusicSignal tiny;
  tiny.id = "tiny";
  tiny.sample_rate = 8000;
  tiny.samples.assign(4, 0.2f);
  const fs::path tiny_wav = test_dir("cli") / "tiny.wav";
  mrh::save_wav(tiny_wav, tiny, 16);
  const CliRun too_short =
      run_cli("query --index " + f.index_path.string() + " --query " + tiny_wav.string());
  CHECK(too_short.exit_code == 1);
  CHECK(too_short.err.find("at least 8") != std::string::npos);
}

TEST_CASE("eval reports perfect retrieval for clean prefixes") {
  const CliFixture& f = fixture();
  const fs::path report = test_dir("cli") / "report.json";
  const std::string cmd = "eval --index " + f.index_path.string() + " --queries " +
                          (f.queries_dir / "manifest.jsonl").string() + " --truth " +
                          (f.queries_dir / "truth.jsonl").string() +
                          " --prune-mode keep-high --xs 1,5,10 --report " + report.string();

  const CliRun r = run_cli(cmd, "MRH_THREADS=2");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("1.0000") != std::string::npos);
  const std::string first = slurp(report);
  const nlohmann::json j = nlohmann::json::parse(first);
  CHECK(j.at("mrr") == 1.0);

  const CliRun again = run_cli(cmd);
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(report) == first);  // identical bytes, run to run
}

TEST_CASE("eval rejects an empty truth file as a usage error") {
  const CliFixture& f = fixture();
  const fs::path empty_truth = test_dir("cli") / "empty_truth.jsonl";
  std::ofstream(empty_truth).flush();
  const CliRun r = run_cli("eval --index " + f.index_path.string() + " --queries " +
                           (f.queries_dir / "manifest.jsonl").string() + " --truth " +
                           empty_truth.string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("eval names dangling truth references") {
  const CliFixture& f = fixture();
  const fs::path bad_truth = test_dir("cli") / "bad_truth.jsonl";
  {
    std::ofstream out(bad_truth);
    out << R"({"query_id":"synth-0004-q0","target_id":"ghost-song"})" << "\n";
  }
  const CliRun r = run_cli("eval --index " + f.index_path.string() + " --queries " +
                           (f.queries_dir / "manifest.jsonl").string() + " --truth " +
                           bad_truth.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("ghost-song") != std::string::npos);
}

TEST_CASE("flags can come from a config file") {
  const CliFixture& f = fixture();
  const fs::path cfg = test_dir("cli") / "index.cfg";
  const fs::path out = test_dir("cli") / "from_config.mrhx";
  {
    std::ofstream c(cfg);
    c << "[index]\n";
    c << "manifest=" << (f.corpus_dir / "manifest.jsonl").string() << "\n";
    c << "bins=50\n";
    c << "levels=2\n";
    c << "out=" << out.string() << "\n";
  }
  const CliRun r = run_cli("index --config " + cfg.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(mrh::load_index(out).params.bins == 50);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("query --help").exit_code == 0);
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}
