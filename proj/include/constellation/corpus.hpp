#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace constellation::corpus {

inline constexpr std::string_view kCsvHeader =
    "rank,model_name,link,downloads,likes,ReadMeLink,params_millions";

inline constexpr std::string_view kReadmeSuffix = "/raw/main/README.md";

/// One hub model's metadata row.
///
/// `model_name` is the final path segment of the hub id; the organisation
/// prefix only lives in `link`, which is the unique key within a corpus.
struct ModelRecord {
  std::int64_t rank = 0;
  std::string model_name;
  std::string link;
  std::optional<std::int64_t> downloads;
  std::optional<std::int64_t> likes;
  std::string readme_link;
  std::optional<double> params_millions;

  bool operator==(const ModelRecord&) const = default;
};

/// An ordered snapshot of model records.
struct Corpus {
  std::vector<ModelRecord> records;
  std::string snapshot_label;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

/// Parses a snapshot CSV. Empty fields and the literal `NaN` map to absent
/// values; float-formatted integers ("13600000.0") are truncated.
///
/// Throws SchemaError for a bad header and RowError for a bad data row.
Corpus parse_csv(std::string_view bytes);

/// Serialises a corpus in the snapshot CSV format. Integers are written in
/// float form ("13600000.0") and absent values as `NaN`, so the output reads
/// like the original dataframe export.
std::string to_csv(const Corpus& corpus);

/// Infers a parameter count (millions) from a model name using the first
/// match of `(\d+(\.\d+)?)(B|M|b|m)`. B/b scales by 1000.
std::optional<double> extract_params(std::string_view model_name);

/// `link` + "/raw/main/README.md", stripping trailing slashes first.
std::string derive_readme_link(std::string_view link);

/// Records with downloads present and >= threshold, re-ranked 1..m.
Corpus filter_min_downloads(const Corpus& corpus, std::uint64_t threshold);

/// Stable sort by downloads descending (absent last); rank = position.
Corpus assign_ranks(Corpus corpus);

/// Names of all records, in corpus order.
std::vector<std::string> model_names(const Corpus& corpus);

/// Final path segment of a hub id or URL ("org/name" -> "name").
std::string final_segment(std::string_view id);

}  // namespace constellation::corpus
