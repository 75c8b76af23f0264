#include "constellation/hub_client.hpp"

#include <cmath>
#include <regex>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"

#include "constellation/error.hpp"

namespace constellation::hub {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ArgumentError("base_url needs a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) ep.prefix = url.substr(path_start);
  while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  return ep;
}

std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::optional<std::int64_t> counter(const json& item, const char* key) {
  auto it = item.find(key);
  if (it == item.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer() || it->is_number_unsigned()) {
    const auto v = it->get<std::int64_t>();
    if (v < 0) throw ParseError(std::string("negative ") + key);
    return v;
  }
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (!std::isfinite(v) || v < 0) throw ParseError(std::string("invalid ") + key);
    return static_cast<std::int64_t>(v);
  }
  throw ParseError(std::string(key) + " is not a number");
}

// Path and query of the rel="next" target, if the Link header names one.
std::optional<std::string> next_link(const httplib::Result& res, const Endpoint& ep) {
  if (!res->has_header("Link")) return std::nullopt;
  static const std::regex next(R"re(<([^>]+)>\s*;\s*rel="?next"?)re");
  std::smatch m;
  const std::string header = res->get_header_value("Link");
  if (!std::regex_search(header, m, next)) return std::nullopt;
  std::string target = m[1].str();
  if (target.starts_with(ep.origin)) return target.substr(ep.origin.size());
  if (auto scheme = target.find("://"); scheme != std::string::npos) {
    auto path = target.find('/', scheme + 3);
    return path == std::string::npos ? std::string("/") : target.substr(path);
  }
  return target;
}

}  // namespace

std::vector<Listing> parse_listing_page(std::string_view body, const FetchConfig& config) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("listing page is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("listing page is not a JSON array");

  std::string base = config.link_base;
  while (!base.empty() && base.back() == '/') base.pop_back();

  std::vector<Listing> out;
  out.reserve(doc.size());
  for (const auto& item : doc) {
    if (!item.is_object()) throw ParseError("listing entry is not an object");
    const json* id = nullptr;
    if (auto it = item.find("id"); it != item.end() && it->is_string()) id = &*it;
    else if (auto alt = item.find("modelId"); alt != item.end() && alt->is_string()) id = &*alt;
    if (id == nullptr || id->get_ref<const std::string&>().empty()) throw ParseError("listing entry without id");

    Listing l;
    l.id = id->get<std::string>();
    l.link = base + "/" + l.id;
    l.downloads = counter(item, "downloads");
    l.likes = counter(item, "likes");
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<Listing> fetch_listings(const FetchConfig& config, std::string_view tag) {
  if (config.page_size < 1) throw ArgumentError("page_size must be at least 1");
  if (config.retry_limit < 0) throw ArgumentError("retry_limit must be non-negative");

  std::vector<Listing> all;
  if (config.max_pages && *config.max_pages == 0) return all;

  const Endpoint ep = split_url(config.base_url);
  httplib::Client client(ep.origin);
  const auto timeout = config.request_timeout;
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);

  const std::string first = ep.prefix + "/api/models?pipeline_tag=" + percent_encode(tag) +
                            "&sort=downloads&direction=-1&limit=" + std::to_string(config.page_size);
  std::string path = first;
  bool linked = false;  // the endpoint pages by Link header

  for (std::size_t page = 0; !config.max_pages || page < *config.max_pages; ++page) {
    httplib::Result res;
    std::string failure;
    for (int attempt = 0;; ++attempt) {
      res = client.Get(path);
      std::chrono::milliseconds wait = config.backoff_initial * (1LL << std::min(attempt, 20));
      if (!res) {
        failure = httplib::to_string(res.error());
      } else if (res->status == 429 || res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
        if (res->has_header("Retry-After")) {
          try {
            wait = std::chrono::seconds(std::stoll(res->get_header_value("Retry-After")));
          } catch (const std::exception&) {
          }
        }
      } else if (res->status != 200) {
        throw FetchError(page, "HTTP " + std::to_string(res->status));
      } else {
        break;
      }
      if (attempt >= config.retry_limit) throw FetchError(page, failure);
      std::this_thread::sleep_for(wait);
    }

    auto listings = parse_listing_page(res->body, config);
    const std::size_t got = listings.size();
    all.insert(all.end(), std::make_move_iterator(listings.begin()), std::make_move_iterator(listings.end()));

    if (got == 0) break;
    if (auto next = next_link(res, ep)) {
      path = *next;
      linked = true;
      continue;
    }
    if (linked || got < config.page_size) break;
    path = first + "&offset=" + std::to_string((page + 1) * config.page_size);
  }
  return all;
}

corpus::Corpus snapshot(const std::vector<Listing>& listings, std::string label) {
  corpus::Corpus c;
  c.snapshot_label = std::move(label);
  std::unordered_set<std::string> seen;
  for (const auto& l : listings) {
    if (!seen.insert(l.link).second) continue;
    corpus::ModelRecord rec;
    rec.model_name = corpus::final_segment(l.id);
    rec.link = l.link;
    rec.downloads = l.downloads;
    rec.likes = l.likes;
    rec.readme_link = corpus::derive_readme_link(l.link);
    rec.params_millions = corpus::extract_params(rec.model_name);
    c.records.push_back(std::move(rec));
  }
  return corpus::assign_ranks(std::move(c));
}

}  // namespace constellation::hub
