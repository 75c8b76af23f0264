#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "constellation/corpus.hpp"

namespace constellation::hub {

struct FetchConfig {
  std::string base_url = "https://huggingface.co";
  std::size_t page_size = 1000;
  std::optional<std::size_t> max_pages;
  int retry_limit = 3;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds request_timeout{30000};
  // Prefix for model links; the hub id is appended after a slash.
  std::string link_base = "https://huggingface.co";
};

/// One model as listed by the hub. Missing counters stay absent.
struct Listing {
  std::string id;  // "org/name" or "name"
  std::string link;
  std::optional<std::int64_t> downloads;
  std::optional<std::int64_t> likes;

  bool operator==(const Listing&) const = default;
};

/// Decodes one page of the JSON listing endpoint: an array of objects with
/// `id` (or `modelId`) and optional `downloads` / `likes`. Throws ParseError.
std::vector<Listing> parse_listing_page(std::string_view body, const FetchConfig& config);

/// Pages through `GET {base}/api/models?pipeline_tag=<tag>&sort=downloads
/// &direction=-1&limit=<page_size>`. A `Link: <...>; rel="next"` header is
/// followed when present; otherwise the next page is requested with an
/// `offset` parameter. Paging stops on an empty or short page, when a
/// Link-paged listing stops naming a next page, or after `max_pages`.
///
/// 429 and 5xx responses and transport failures are retried with doubling
/// backoff (a Retry-After header in seconds takes precedence). Throws
/// FetchError naming the page once retries run out, ParseError on a
/// malformed payload.
std::vector<Listing> fetch_listings(const FetchConfig& config, std::string_view tag);

/// Builds a ranked corpus: parameter inference, README links, download
/// ranking. Later duplicates of a link are dropped, so page order decides.
corpus::Corpus snapshot(const std::vector<Listing>& listings, std::string label);

}  // namespace constellation::hub
