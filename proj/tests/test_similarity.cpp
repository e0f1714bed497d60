#include "mrh/similarity.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrh/rng.hpp"
#include "mrh/signal.hpp"
#include "test_util.hpp"

using namespace mrh;

namespace {

const BinSpec kSpec3 = make_bin_spec(0.0, 1.0, 3);

NormalizedHistogram norm3(double a, double b, double c) {
  return NormalizedHistogram{kSpec3, {a, b, c}};
}

// Independent scalar path used as the oracle for match_level: histogram
// intersection scaled by the Euclidean shape factor, written from scratch.
double ref_mrhd(const std::vector<double>& a, const std::vector<double>& b) {
  double inter = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += std::min(a[i], b[i]);
    sq += (a[i] - b[i]) * (a[i] - b[i]);
  }
  const double root2 = std::sqrt(2.0);
  return inter * (root2 - std::sqrt(sq)) / root2;
}

NormalizedHistogram random_normalized(SplitMix64& rng, std::uint32_t bins) {
  std::vector<double> mass(bins);
  double sum = 0.0;
  for (auto& m : mass) {
    m = rng.unit();
    sum += m;
  }
  for (auto& m : mass) {
    m /= sum;
  }
  return NormalizedHistogram{make_bin_spec(0.0, 1.0, bins), std::move(mass)};
}

MusicSignal random_signal(SplitMix64& rng, const std::string& id, std::size_t n) {
  MusicSignal sig;
  sig.id = id;
  sig.sample_rate = 8000;
  sig.samples.resize(n);
  for (auto& s : sig.samples) {
    s = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  return sig;
}

}  // namespace

TEST_CASE("euclidean distance over mass vectors") {
  CHECK(euclidean(norm3(0.5, 0.5, 0.0), norm3(0.5, 0.5, 0.0)) == 0.0);
  CHECK(euclidean(norm3(0.5, 0.5, 0.0), norm3(0.5, 0.0, 0.5)) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const BinSpec two = make_bin_spec(0.0, 1.0, 2);
  const NormalizedHistogram left{two, {1.0, 0.0}};
  const NormalizedHistogram right{two, {0.0, 1.0}};
  CHECK(euclidean(left, right) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK_RAISES(Errc::spec_mismatch, euclidean(left, norm3(1, 0, 0)));
}

TEST_CASE("l1 distance over raw counts") {
  const Histogram a{kSpec3, {1, 1, 2}, 4};
  const Histogram b{kSpec3, {0, 2, 2}, 4};
  CHECK(l1_distance(a, a) == 0.0);
  CHECK(l1_distance(a, b) == 2.0);

  const BinSpec one = make_bin_spec(0.0, 1.0, 1);
  CHECK(l1_distance(Histogram{one, {3}, 3}, Histogram{one, {0}, 0}) == 3.0);
  CHECK_RAISES(Errc::spec_mismatch, l1_distance(a, Histogram{one, {3}, 3}));
}

TEST_CASE("mrhd hand-derived cases") {
  SUBCASE("identical histograms score 1") {
    const NormalizedHistogram h = norm3(0.2, 0.3, 0.5);
    CHECK(mrhd(h, h) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("disjoint supports score exactly 0") {
    const BinSpec two = make_bin_spec(0.0, 1.0, 2);
    CHECK(mrhd(NormalizedHistogram{two, {1.0, 0.0}}, NormalizedHistogram{two, {0.0, 1.0}}) == 0.0);
  }
  SUBCASE("intersection 0.5 with distance sqrt(0.5) gives 0.25") {
    CHECK(mrhd(norm3(0.5, 0.5, 0.0), norm3(0.5, 0.0, 0.5)) ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("mrhd is symmetric and confined to [0, 1]") {
  SplitMix64 rng(808);
  for (int iter = 0; iter < 300; ++iter) {
    const auto bins = static_cast<std::uint32_t>(1 + rng.below(64));
    const NormalizedHistogram a = random_normalized(rng, bins);
    const NormalizedHistogram b = random_normalized(rng, bins);
    const double ab = mrhd(a, b);
    CHECK(ab == mrhd(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(euclidean(a, b) <= std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("match_level on identical trees scores 1 in both modes") {
  SplitMix64 rng(909);
  const MusicSignal sig = random_signal(rng, "self", 256);
  const MultiResHistogram tree = build_mrh(sig, make_bin_spec(-1, 1, 16), 3);
  for (std::uint32_t level = 0; level <= 3; ++level) {
    CHECK(match_level(tree, tree, level, MatchMode::aligned).score ==
          doctest::Approx(1.0).epsilon(1e-12));
    const LevelScore best = match_level(tree, tree, level, MatchMode::best_match);
    CHECK(best.score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(best.best_offset == 0);
  }
}

TEST_CASE("match_level equals an independent double loop over segment pairs") {
  SplitMix64 rng(1010);
  const BinSpec spec = make_bin_spec(-1, 1, 24);
  const MusicSignal qs = random_signal(rng, "q", 320);
  const MusicSignal ss = random_signal(rng, "s", 320);
  const MultiResHistogram q = build_mrh(qs, spec, 2);
  const MultiResHistogram s = build_mrh(ss, spec, 2);

  // aligned: mean over the diagonal
  double diag = 0.0;
  for (std::size_t p = 0; p < 4; ++p) {
    diag += ref_mrhd(q.levels[2][p].norm.mass, s.levels[2][p].norm.mass);
  }
  diag /= 4.0;
  CHECK(match_level(q, s, 2, MatchMode::aligned).score == doctest::Approx(diag).epsilon(1e-12));

  // best_match: mean over query rows of the row maximum
  double best_sum = 0.0;
  for (std::size_t p = 0; p < 4; ++p) {
    double row_best = -1.0;
    for (std::size_t k = 0; k < 4; ++k) {
      row_best = std::max(row_best, ref_mrhd(q.levels[2][p].norm.mass, s.levels[2][k].norm.mass));
    }
    best_sum += row_best;
  }
  best_sum /= 4.0;
  const LevelScore got = match_level(q, s, 2, MatchMode::best_match);
  CHECK(got.score == doctest::Approx(best_sum).epsilon(1e-12));
  CHECK(got.level == 2);
}

TEST_CASE("best_match dominates aligned for every pair and level") {
  SplitMix64 rng(1111);
  for (int iter = 0; iter < 40; ++iter) {
    const BinSpec spec = make_bin_spec(-1, 1, static_cast<std::uint32_t>(2 + rng.below(32)));
    const std::size_t n = 128 + rng.below(64);
    const MultiResHistogram a = build_mrh(random_signal(rng, "a", n), spec, 3);
    const MultiResHistogram b = build_mrh(random_signal(rng, "b", n), spec, 3);
    for (std::uint32_t level = 0; level <= 3; ++level) {
      CHECK(match_level(a, b, level, MatchMode::best_match).score >=
            match_level(a, b, level, MatchMode::aligned).score - 1e-12);
    }
  }
}

TEST_CASE("a half-length prefix query meets its song at matching granularity") {
  SplitMix64 rng(1212);
  const MusicSignal song = random_signal(rng, "song", 512);
  MusicSignal query;
  query.id = "query";
  query.sample_rate = song.sample_rate;
  query.samples.assign(song.samples.begin(), song.samples.begin() + 256);

  const BinSpec spec = make_bin_spec(-1, 1, 32);
  const MultiResHistogram song_tree = build_mrh(song, spec, 3);
  const MultiResHistogram query_tree = build_mrh(query, spec, 2);

  for (std::uint32_t level : {1u, 2u, 3u}) {
    const LevelScore score = match_level(query_tree, song_tree, level, MatchMode::best_match);
    // The query's segments are bitwise copies of the song's level-`level`
    // segments 0..2^(level-1)-1, so each row maximum is an exact histogram match.
    CHECK(score.score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(score.best_offset == 0);
  }

  CHECK_RAISES(Errc::segment_count_mismatch,
               match_level(query_tree, song_tree, 1, MatchMode::aligned));
}

TEST_CASE("match_level rejects absent levels") {
  SplitMix64 rng(1313);
  const BinSpec spec = make_bin_spec(-1, 1, 8);
  const MultiResHistogram a = build_mrh(random_signal(rng, "a", 64), spec, 2);
  const MultiResHistogram b = build_mrh(random_signal(rng, "b", 64), spec, 3);
  CHECK_RAISES(Errc::level_out_of_range, match_level(a, b, 4, MatchMode::best_match));
  CHECK_RAISES(Errc::level_out_of_range, match_level(b, a, 3, MatchMode::best_match));
  const MultiResHistogram other = build_mrh(random_signal(rng, "c", 64),
                                            make_bin_spec(-1, 1, 9), 2);
  CHECK_RAISES(Errc::spec_mismatch, match_level(a, other, 1, MatchMode::best_match));
}

TEST_CASE("parent pair L1 never exceeds the summed child pair L1") {
  SplitMix64 rng(1414);
  const BinSpec spec = make_bin_spec(-1, 1, 16);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t n = 64 + rng.below(128);
    const MultiResHistogram a = build_mrh(random_signal(rng, "a", n), spec, 3);
    const MultiResHistogram b = build_mrh(random_signal(rng, "b", n), spec, 3);
    for (std::uint32_t j = 0; j < 3; ++j) {
      for (std::size_t p = 0; p < a.levels[j].size(); ++p) {
        const double parent = l1_distance(a.levels[j][p].raw, b.levels[j][p].raw);
        const double children =
            l1_distance(a.levels[j + 1][2 * p].raw, b.levels[j + 1][2 * p].raw) +
            l1_distance(a.levels[j + 1][2 * p + 1].raw, b.levels[j + 1][2 * p + 1].raw);
        CHECK(parent <= children);
      }
    }
  }
}

TEST_CASE("level-0 histograms are invariant to cyclic shifts") {
  SplitMix64 rng(1515);
  MusicSignal sig = random_signal(rng, "orig", 200);
  const BinSpec spec = make_bin_spec(-1, 1, 20);
  const MultiResHistogram before = build_mrh(sig, spec, 0);

  std::rotate(sig.samples.begin(), sig.samples.begin() + 37, sig.samples.end());
  const MultiResHistogram after = build_mrh(sig, spec, 0);

  CHECK(before.levels[0][0].raw == after.levels[0][0].raw);
  const NormalizedHistogram probe = random_normalized(rng, 20);
  CHECK(mrhd(before.levels[0][0].norm, probe) == mrhd(after.levels[0][0].norm, probe));
}
