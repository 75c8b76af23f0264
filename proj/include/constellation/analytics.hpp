#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "constellation/cluster.hpp"
#include "constellation/corpus.hpp"

namespace constellation::analytics {

struct WordFrequencyTable {
  std::string scope = "global";  // "global" or the cluster label
  std::map<std::string, std::size_t> entries;

  std::size_t total() const;
};

/// How names are split for the word tables.
enum class Granularity {
  words,        // [a-z0-9]+ runs of the lowercased name
  char_ngrams,  // the 2..8 character n-grams used for similarity
};

/// Lowercase, then split on every character outside [a-z0-9].
std::vector<std::string> word_tokens(std::string_view name);

WordFrequencyTable word_frequencies(const std::vector<std::string>& names,
                                    Granularity granularity = Granularity::words);

/// Entries ordered by count descending, then word ascending.
std::vector<std::pair<std::string, std::size_t>> ranked(const WordFrequencyTable& table);

/// Keeps the `top_n` highest-ranked entries.
WordFrequencyTable truncate(const WordFrequencyTable& table, std::size_t top_n);

/// One table per cluster label (scope = label as text), each truncated to
/// `top_n` entries.
std::vector<WordFrequencyTable> cluster_word_tables(const corpus::Corpus& corpus,
                                                    const cluster::FlatClustering& flat,
                                                    std::size_t top_n,
                                                    Granularity granularity = Granularity::words);

/// Sample Pearson correlation over pairs where both values are present.
/// Throws UndefinedError with fewer than two pairs or a constant series.
double pearson(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys);
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScatterPoint {
  double log_downloads = 0.0;
  double log_likes = 0.0;
  std::string name;
};

/// log10 coordinates; records with absent or non-positive values are skipped.
std::vector<ScatterPoint> scatter_points(const corpus::Corpus& corpus);

struct SummaryStats {
  std::size_t model_count = 0;
  std::size_t params_inferred_count = 0;
  double params_inferred_fraction = 0.0;
  std::optional<double> likes_downloads_pearson;
  std::vector<std::pair<std::string, std::int64_t>> top_models;
};

inline constexpr std::size_t kTopModels = 10;

SummaryStats summary_stats(const corpus::Corpus& corpus, std::size_t top = kTopModels);

nlohmann::json to_json(const WordFrequencyTable& table);
nlohmann::json to_json(const std::vector<WordFrequencyTable>& tables);
nlohmann::json to_json(const SummaryStats& stats);
nlohmann::json to_json(const std::vector<ScatterPoint>& points);

}  // namespace constellation::analytics
