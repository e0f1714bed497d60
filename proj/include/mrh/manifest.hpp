#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mrh/evaluation.hpp"
#include "mrh/signal.hpp"

namespace mrh {

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
};

// Corpus manifest: one JSON object per line, {"id": ..., "path": ...}.
// Relative paths resolve against the manifest's directory on read.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

// Loads every manifest entry as a WAV, in manifest order.
Corpus load_corpus(const std::filesystem::path& manifest_path);

// Ground truth: one JSON object per line, {"query_id": ..., "target_id": ...}.
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace mrh
