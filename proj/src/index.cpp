#include "mrh/index.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include <json.hpp>

#include "mrh/parallel.hpp"

namespace mrh {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'H', 'X'};
constexpr std::uint32_t kVersion = 1;

// CRC-32 (IEEE), reflected polynomial 0xEDB88320.
std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      }
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) {
    crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
}

// Bounds-checked little-endian reader for load_index.
class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    }
    pos_ += 8;
    return v;
  }

  std::string str(std::size_t len) {
    need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }

  bool exhausted() const { return pos_ == size_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > size_) {
      raise(Errc::bad_format, "index file ends mid-record");
    }
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

nlohmann::json params_to_json(const IndexParams& p) {
  return nlohmann::json{{"bins", p.bins},
                        {"levels", p.levels},
                        {"max_amp", p.max_amp},
                        {"min_amp", p.min_amp},
                        {"normalized", p.normalized_input}};
}

IndexParams params_from_json(const nlohmann::json& j) {
  IndexParams p;
  p.bins = j.at("bins").get<std::uint32_t>();
  p.levels = j.at("levels").get<std::uint32_t>();
  p.min_amp = j.at("min_amp").get<double>();
  p.max_amp = j.at("max_amp").get<double>();
  p.normalized_input = j.at("normalized").get<bool>();
  return p;
}

}  // namespace

std::pair<double, double> corpus_range(const Corpus& corpus) {
  if (corpus.signals.empty()) {
    raise(Errc::empty_corpus, "corpus holds no signals");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& sig : corpus.signals) {
    for (float s : sig.samples) {
      lo = std::min(lo, static_cast<double>(s));
      hi = std::max(hi, static_cast<double>(s));
    }
  }
  if (!(lo <= hi)) {
    raise(Errc::invalid_argument, "corpus holds no samples");
  }
  return {lo, hi};
}

Index build_index(const Corpus& corpus, std::uint32_t bins, std::uint32_t levels,
                  unsigned threads) {
  if (corpus.signals.empty()) {
    raise(Errc::empty_corpus, "cannot index an empty corpus");
  }
  if (bins == 0) {
    raise(Errc::invalid_argument, "bin count must be at least 1");
  }
  if (levels > kMaxLevels) {
    raise(Errc::invalid_argument,
          "level count " + std::to_string(levels) + " exceeds the maximum of " +
              std::to_string(kMaxLevels));
  }
  const std::uint64_t min_len = std::uint64_t{1} << levels;
  for (const auto& sig : corpus.signals) {
    if (sig.samples.size() < min_len) {
      raise(Errc::signal_too_short,
            "signal '" + sig.id + "' has " + std::to_string(sig.samples.size()) +
                " samples; " + std::to_string(min_len) + " are needed for " +
                std::to_string(levels) + " levels");
    }
  }

  const auto [lo, hi] = corpus_range(corpus);
  const BinSpec spec = make_bin_spec(lo, hi, bins);

  std::vector<MultiResHistogram> trees(corpus.signals.size());
  parallel_for(corpus.signals.size(), threads,
               [&](std::size_t i) { trees[i] = build_mrh(corpus.signals[i], spec, levels); });

  Index index;
  index.params = IndexParams{bins, levels, lo, hi, true};
  for (std::size_t i = 0; i < corpus.signals.size(); ++i) {
    const std::string& id = corpus.signals[i].id;
    const auto [it, inserted] = index.entries.emplace(id, std::move(trees[i]));
    (void)it;
    if (!inserted) {
      raise(Errc::invalid_argument, "duplicate signal id '" + id + "' in corpus");
    }
    index.song_lengths[id] = corpus.signals[i].samples.size();
  }
  return index;
}

void save_index(const Index& index, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);

  const std::string params = params_to_json(index.params).dump();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  out.insert(out.end(), params.begin(), params.end());

  put_u32(out, static_cast<std::uint32_t>(index.entries.size()));
  for (const auto& [id, tree] : index.entries) {
    put_u32(out, static_cast<std::uint32_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
    put_u64(out, index.song_lengths.at(id));
    for (const auto& level : tree.levels) {
      for (const auto& node : level) {
        for (std::uint64_t c : node.raw.counts) {
          put_u64(out, c);
        }
      }
    }
  }
  put_u32(out, crc32(out.data(), out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    raise(Errc::io_failure, "cannot write '" + path.string() + "'");
  }
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) {
    raise(Errc::io_failure, "short write to '" + path.string() + "'");
  }
}

Index load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::io_failure, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 16) {
    raise(Errc::bad_format, "'" + path.string() + "' is too short to be an index file");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    raise(Errc::bad_magic, "bad magic in '" + path.string() + "'");
  }

  Reader head(bytes.data() + 4, 4);
  const std::uint32_t version = head.u32();
  if (version != kVersion) {
    raise(Errc::bad_version,
          "index version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kVersion) + ")");
  }

  // The CRC covers everything before the trailer, magic included.
  Reader tail(bytes.data() + bytes.size() - 4, 4);
  if (crc32(bytes.data(), bytes.size() - 4) != tail.u32()) {
    raise(Errc::bad_checksum, "checksum mismatch in '" + path.string() + "'");
  }

  Reader r(bytes.data() + 8, bytes.size() - 12);
  const std::uint32_t params_len = r.u32();
  nlohmann::json params_json;
  try {
    params_json = nlohmann::json::parse(r.str(params_len));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::bad_format, "unparseable params block: " + std::string(e.what()));
  }

  Index index;
  try {
    index.params = params_from_json(params_json);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::bad_format, "params block missing fields: " + std::string(e.what()));
  }
  if (index.params.bins == 0 || index.params.bins > (1u << 24) ||
      index.params.levels > kMaxLevels || index.params.min_amp > index.params.max_amp) {
    raise(Errc::bad_format, "params block out of range");
  }

  const BinSpec spec = index.bin_spec();
  const std::uint32_t song_count = r.u32();
  for (std::uint32_t s = 0; s < song_count; ++s) {
    const std::uint32_t id_len = r.u32();
    const std::string id = r.str(id_len);
    const std::uint64_t n_samples = r.u64();

    MultiResHistogram tree;
    tree.song_id = id;
    tree.spec = spec;
    tree.levels.resize(index.params.levels + 1);
    for (std::uint32_t j = 0; j <= index.params.levels; ++j) {
      tree.levels[j].resize(std::size_t{1} << j);
      for (auto& node : tree.levels[j]) {
        node.raw.spec = spec;
        node.raw.counts.resize(index.params.bins);
        std::uint64_t total = 0;
        for (auto& c : node.raw.counts) {
          c = r.u64();
          total += c;
        }
        if (total == 0) {
          raise(Errc::bad_format, "empty histogram node for song '" + id + "'");
        }
        node.raw.total = total;
        node.norm = normalize(node.raw);
      }
    }
    if (tree.signal_length() != n_samples) {
      raise(Errc::bad_format, "sample count mismatch for song '" + id + "'");
    }
    if (!index.entries.emplace(id, std::move(tree)).second) {
      raise(Errc::bad_format, "duplicate song id '" + id + "' in index file");
    }
    index.song_lengths[id] = n_samples;
  }
  if (!r.exhausted()) {
    raise(Errc::bad_format, "trailing bytes after the last song record");
  }
  return index;
}

}  // namespace mrh
