#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "constellation/corpus.hpp"

namespace constellation::atlas {

inline constexpr std::uint64_t kDefaultMinDownloads = 10000;
inline constexpr std::size_t kDefaultClusters = 20;
inline constexpr double kDefaultThreshold = 0.2;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kDefaultIterations = 50;
inline constexpr std::size_t kDefaultWordsPerCluster = 50;

/// The user-facing knobs; also the cache key for served bundles.
struct AtlasQuery {
  std::uint64_t min_downloads = kDefaultMinDownloads;
  std::size_t k = kDefaultClusters;
  double threshold = kDefaultThreshold;
  std::uint64_t seed = kDefaultSeed;

  bool operator==(const AtlasQuery&) const = default;
};

/// Throws ArgumentError unless k >= 1 and threshold lies in [0, 1].
void validate(const AtlasQuery& query);

nlohmann::json to_json(const AtlasQuery& query);

/// Reads a query, filling missing fields with defaults. Throws ArgumentError
/// for wrongly typed or out-of-range fields.
AtlasQuery query_from_json(const nlohmann::json& doc);

struct AtlasOptions {
  int layout_iterations = kDefaultIterations;
  std::size_t words_per_cluster = kDefaultWordsPerCluster;
};

/// Everything derived from one filtered corpus.
struct Atlas {
  nlohmann::json stats;
  std::string newick;
  nlohmann::json tree;
  nlohmann::json graph;
  nlohmann::json wordclouds;
  nlohmann::json scatter;

  std::size_t model_count = 0;
  std::size_t cluster_count = 0;
  std::size_t community_count = 0;
};

/// filter -> tf-idf -> similarity -> single linkage + k-cut -> threshold
/// graph -> Louvain -> layout -> analytics.
///
/// Throws EmptySelectionError when no model passes the download filter and
/// ClusterCountError when k exceeds the filtered model count.
Atlas compute_atlas(const corpus::Corpus& corpus, const AtlasQuery& query, const AtlasOptions& options = {});

/// The artifact file names, in write order.
const std::vector<std::string>& artifact_names();

/// Writes the six artifacts into `dir` (created if missing).
void write_artifacts(const Atlas& atlas, const std::filesystem::path& dir);

/// Serialised bundle served by the HTTP API.
nlohmann::json bundle_json(const Atlas& atlas, const AtlasQuery& query, const std::string& computed_at);

}  // namespace constellation::atlas
