#include "mrh/mrh_tree.hpp"

#include <doctest.h>

#include <algorithm>

#include "mrh/index.hpp"
#include "mrh/rng.hpp"
#include "test_util.hpp"

using namespace mrh;

namespace {

MusicSignal make_signal(const std::string& id, std::vector<float> samples) {
  MusicSignal s;
  s.id = id;
  s.sample_rate = 8000;
  s.samples = std::move(samples);
  return s;
}

}  // namespace

TEST_CASE("levels=0 gives a single node equal to the whole-signal histogram") {
  const MusicSignal sig = make_signal("a", {1.0f, 0.5f, -0.5f, 0.0f});
  const BinSpec spec = make_bin_spec(-1.0, 1.0, 4);
  const MultiResHistogram tree = build_mrh(sig, spec, 0);
  REQUIRE(tree.level_count() == 1);
  REQUIRE(tree.levels[0].size() == 1);
  CHECK(tree.levels[0][0].raw == build_histogram(sig.samples, spec));
  CHECK(tree.node_count() == 1);
}

TEST_CASE("node count follows the geometric sum") {
  const Corpus corpus = synth_corpus(1, 1, 64, 8000);
  const MultiResHistogram tree = build_mrh(corpus.signals[0], make_bin_spec(-1, 1, 8), 3);
  CHECK(tree.node_count() == 15);  // 2^4 - 1
  for (std::uint32_t j = 0; j <= 3; ++j) {
    CHECK(tree.levels[j].size() == (std::size_t{1} << j));
  }
}

TEST_CASE("hand-binned two-level example") {
  const MusicSignal sig = make_signal("a", {1.0f, 2.0f, 3.0f, 4.0f});
  const BinSpec spec = make_bin_spec(1.0, 4.0, 3);
  const MultiResHistogram tree = build_mrh(sig, spec, 1);
  CHECK(tree.levels[0][0].raw.counts == std::vector<std::uint64_t>{1, 1, 2});
  CHECK(tree.levels[1][0].raw.counts == std::vector<std::uint64_t>{1, 1, 0});
  CHECK(tree.levels[1][1].raw.counts == std::vector<std::uint64_t>{0, 0, 2});
}

TEST_CASE("build_mrh rejects too-short signals and oversized level budgets") {
  const MusicSignal sig = make_signal("tiny", {1.0f, 2.0f, 3.0f});
  CHECK_RAISES(Errc::signal_too_short, build_mrh(sig, make_bin_spec(0, 4, 2), 2));
  const MusicSignal ok = make_signal("ok", std::vector<float>(16, 0.0f));
  CHECK_RAISES(Errc::invalid_argument, build_mrh(ok, make_bin_spec(0, 4, 2), kMaxLevels + 1));
}

TEST_CASE("every parent's raw counts equal the sum of its children") {
  SplitMix64 rng(606);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n = 16 + rng.below(200);
    std::vector<float> samples(n);
    for (auto& s : samples) {
      s = static_cast<float>(rng.uniform(-1.0, 1.0));
    }
    const auto levels = static_cast<std::uint32_t>(rng.below(5));
    const BinSpec spec = make_bin_spec(-1.0, 1.0, static_cast<std::uint32_t>(1 + rng.below(32)));
    const MultiResHistogram tree =
        build_mrh(make_signal("fuzz", std::move(samples)), spec, levels);

    for (std::uint32_t j = 0; j < levels; ++j) {
      for (std::size_t p = 0; p < tree.levels[j].size(); ++p) {
        const auto& parent = tree.levels[j][p].raw.counts;
        const auto& left = tree.levels[j + 1][2 * p].raw.counts;
        const auto& right = tree.levels[j + 1][2 * p + 1].raw.counts;
        for (std::size_t b = 0; b < parent.size(); ++b) {
          CHECK(parent[b] == left[b] + right[b]);
        }
      }
    }
  }
}

TEST_CASE("build_index scans the corpus range and shares one spec") {
  Corpus corpus;
  corpus.signals.push_back(make_signal("low", {-0.8f, 0.1f, 0.0f, 0.2f}));
  corpus.signals.push_back(make_signal("high", {0.9f, -0.1f, 0.3f, 0.4f}));

  const Index index = build_index(corpus, 10, 1);
  CHECK(index.size() == 2);
  CHECK(index.params.min_amp == doctest::Approx(-0.8).epsilon(1e-7));
  CHECK(index.params.max_amp == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(index.params.bins == 10);
  CHECK(index.song_lengths.at("low") == 4);
  for (const auto& [id, tree] : index.entries) {
    CHECK(tree.spec == index.bin_spec());
  }
}

TEST_CASE("build_index singleton corpus") {
  Corpus corpus;
  corpus.signals.push_back(make_signal("only", {0.0f, 0.5f, -0.5f, 0.25f}));
  const Index index = build_index(corpus, 4, 2);
  CHECK(index.size() == 1);
  CHECK(index.entries.at("only").node_count() == 7);
}

TEST_CASE("build_index names the offending signal") {
  Corpus corpus = synth_corpus(3, 2, 64, 8000);
  corpus.signals.push_back(make_signal("runt", {0.1f, 0.2f, 0.3f}));
  try {
    build_index(corpus, 8, 2);
    FAIL("expected signal_too_short");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::signal_too_short);
    CHECK(std::string(e.what()).find("runt") != std::string::npos);
  }

  CHECK_RAISES(Errc::empty_corpus, build_index(Corpus{}, 8, 2));

  Corpus dup = synth_corpus(3, 1, 64, 8000);
  dup.signals.push_back(dup.signals[0]);
  CHECK_RAISES(Errc::invalid_argument, build_index(dup, 8, 2));
}

TEST_CASE("build_index is order independent and thread independent") {
  Corpus corpus = synth_corpus(12, 8, 128, 8000);
  const Index a = build_index(corpus, 16, 3);

  std::reverse(corpus.signals.begin(), corpus.signals.end());
  const Index b = build_index(corpus, 16, 3);
  CHECK(a == b);

  const Index c = build_index(corpus, 16, 3, 4);
  CHECK(a == c);
}
