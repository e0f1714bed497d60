#include "mrh/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "mrh/wav.hpp"

namespace mrh {

namespace {

// Parses one JSON object per non-empty line, reporting the line number on
// failure.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::io_failure, "cannot open '" + path.string() + "'");
  }
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::bad_format,
            path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  for (const auto& j : read_jsonl(path)) {
    if (!j.contains("id") || !j.contains("path")) {
      raise(Errc::bad_format, "manifest line lacks id or path in '" + path.string() + "'");
    }
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    std::filesystem::path p = j.at("path").get<std::string>();
    e.path = p.is_absolute() ? p : base / p;
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    raise(Errc::io_failure, "cannot write '" + path.string() + "'");
  }
  for (const ManifestEntry& e : entries) {
    out << nlohmann::json{{"id", e.id}, {"path", e.path.string()}}.dump() << "\n";
  }
  if (!out) {
    raise(Errc::io_failure, "short write to '" + path.string() + "'");
  }
}

Corpus load_corpus(const std::filesystem::path& manifest_path) {
  Corpus corpus;
  for (const ManifestEntry& e : read_manifest(manifest_path)) {
    MusicSignal sig = load_wav(e.path);
    sig.id = e.id;  // the manifest id wins over the file stem
    corpus.signals.push_back(std::move(sig));
  }
  if (corpus.signals.empty()) {
    raise(Errc::empty_corpus, "manifest '" + manifest_path.string() + "' lists no signals");
  }
  return corpus;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  GroundTruth truth;
  for (const auto& j : read_jsonl(path)) {
    if (!j.contains("query_id") || !j.contains("target_id")) {
      raise(Errc::bad_format,
            "ground-truth line lacks query_id or target_id in '" + path.string() + "'");
    }
    truth.pairs[j.at("query_id").get<std::string>()] = j.at("target_id").get<std::string>();
  }
  return truth;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    raise(Errc::io_failure, "cannot write '" + path.string() + "'");
  }
  for (const auto& [query_id, target_id] : truth.pairs) {
    out << nlohmann::json{{"query_id", query_id}, {"target_id", target_id}}.dump() << "\n";
  }
  if (!out) {
    raise(Errc::io_failure, "short write to '" + path.string() + "'");
  }
}

}  // namespace mrh
