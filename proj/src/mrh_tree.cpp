#include "mrh/mrh_tree.hpp"

namespace mrh {

std::size_t MultiResHistogram::node_count() const {
  std::size_t n = 0;
  for (const auto& level : levels) {
    n += level.size();
  }
  return n;
}

MultiResHistogram build_mrh(std::span<const float> samples, const std::string& id,
                            const BinSpec& spec, std::uint32_t levels) {
  if (levels > kMaxLevels) {
    raise(Errc::invalid_argument,
          "level count " + std::to_string(levels) + " exceeds the maximum of " +
              std::to_string(kMaxLevels));
  }
  if (samples.empty() || samples.size() < (std::uint64_t{1} << levels)) {
    raise(Errc::signal_too_short,
          "signal '" + id + "' has " + std::to_string(samples.size()) +
              " samples; " + std::to_string(std::uint64_t{1} << levels) +
              " are needed for " + std::to_string(levels) + " levels");
  }

  const auto segments = split_dyadic(samples, levels, id);
  MultiResHistogram tree;
  tree.song_id = id;
  tree.spec = spec;
  tree.levels.resize(levels + 1);
  for (std::uint32_t j = 0; j <= levels; ++j) {
    tree.levels[j].reserve(segments[j].size());
    for (const Segment& seg : segments[j]) {
      MrhNode node;
      node.raw = build_histogram(seg.samples, spec);
      node.norm = normalize(node.raw);
      tree.levels[j].push_back(std::move(node));
    }
  }
  return tree;
}

MultiResHistogram build_mrh(const MusicSignal& signal, const BinSpec& spec, std::uint32_t levels) {
  return build_mrh(std::span<const float>(signal.samples), signal.id, spec, levels);
}

}  // namespace mrh
