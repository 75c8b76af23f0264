#include "constellation/server.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iostream>
#include <list>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "httplib.h"
#include "json.hpp"

#include "constellation/analytics.hpp"

namespace constellation::server {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

using Key = std::tuple<std::uint64_t, std::uint64_t, std::size_t, double, std::uint64_t>;
using Body = std::shared_ptr<const std::string>;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}, {"status", status}}.dump(), kJson);
}

// Parses ?min_downloads=M; absent means the default. Returns nullopt when
// the value is not a non-negative integer.
std::optional<std::uint64_t> min_downloads_param(const httplib::Request& req) {
  if (!req.has_param("min_downloads")) return atlas::kDefaultMinDownloads;
  const std::string raw = req.get_param_value("min_downloads");
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (raw.empty() || ec != std::errc{} || ptr != raw.data() + raw.size()) return std::nullopt;
  return value;
}

struct CorpusFileStamp {
  std::uintmax_t size = 0;
  std::filesystem::file_time_type mtime;
  bool operator==(const CorpusFileStamp&) const = default;
};

}  // namespace

struct AtlasServer::Impl {
  ServerConfig config;
  httplib::Server http;
  bool bound = false;

  // Corpus snapshot; swapped whole under state_mu.
  mutable std::mutex state_mu;
  std::shared_ptr<const corpus::Corpus> corpus;
  std::uint64_t generation = 0;
  std::optional<CorpusFileStamp> stamp;

  // LRU of bundles, most recent at the front.
  std::mutex cache_mu;
  std::list<Key> lru;
  std::map<Key, std::pair<std::shared_future<Body>, std::list<Key>::iterator>> cache;
  std::atomic<std::size_t> computations{0};

  explicit Impl(ServerConfig c) : config(std::move(c)) { routes(); }

  ~Impl() {
    // Let running computations finish before their captured state goes away.
    std::lock_guard lock(cache_mu);
    for (auto& [_, entry] : cache) entry.first.wait();
  }

  void install(corpus::Corpus c, std::optional<CorpusFileStamp> new_stamp) {
    auto fresh = std::make_shared<const corpus::Corpus>(std::move(c));
    {
      std::lock_guard lock(state_mu);
      corpus = std::move(fresh);
      stamp = new_stamp;
      ++generation;
    }
    std::lock_guard lock(cache_mu);
    cache.clear();
    lru.clear();
  }

  static CorpusFileStamp stat(const std::filesystem::path& p) {
    return {std::filesystem::file_size(p), std::filesystem::last_write_time(p)};
  }

  void load_file() {
    const auto& path = *config.corpus_path;
    const auto before = stat(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto parsed = corpus::parse_csv(buf.str());
    parsed.snapshot_label = path.stem().string();
    install(std::move(parsed), before);
  }

  // Reloads the corpus file if it changed on disk. A broken file keeps the
  // previous corpus in service.
  void refresh() {
    if (!config.corpus_path) return;
    std::error_code ec;
    const auto size = std::filesystem::file_size(*config.corpus_path, ec);
    if (ec) return;
    const auto mtime = std::filesystem::last_write_time(*config.corpus_path, ec);
    if (ec) return;
    {
      std::lock_guard lock(state_mu);
      if (stamp && *stamp == CorpusFileStamp{size, mtime}) return;
    }
    try {
      load_file();
    } catch (const std::exception& e) {
      std::cerr << "corpus reload failed: " << e.what() << '\n';
    }
  }

  std::pair<std::shared_ptr<const corpus::Corpus>, std::uint64_t> current() {
    refresh();
    std::lock_guard lock(state_mu);
    return {corpus, generation};
  }

  std::shared_future<Body> bundle_future(const std::shared_ptr<const corpus::Corpus>& snapshot,
                                         std::uint64_t gen, const atlas::AtlasQuery& q) {
    const Key key{gen, q.min_downloads, q.k, q.threshold, q.seed};
    std::lock_guard lock(cache_mu);
    if (auto it = cache.find(key); it != cache.end()) {
      lru.splice(lru.begin(), lru, it->second.second);
      return it->second.first;
    }
    ++computations;
    auto options = config.atlas_options;
    std::shared_future<Body> fut = std::async(std::launch::async, [snapshot, q, options] {
                                     auto result = atlas::compute_atlas(*snapshot, q, options);
                                     return std::make_shared<const std::string>(
                                         atlas::bundle_json(result, q, utc_now()).dump());
                                   }).share();
    lru.push_front(key);
    cache.emplace(key, std::make_pair(fut, lru.begin()));
    while (cache.size() > config.cache_capacity) {
      cache.erase(lru.back());
      lru.pop_back();
    }
    return fut;
  }

  void forget(std::uint64_t gen, const atlas::AtlasQuery& q) {
    const Key key{gen, q.min_downloads, q.k, q.threshold, q.seed};
    std::lock_guard lock(cache_mu);
    if (auto it = cache.find(key); it != cache.end()) {
      lru.erase(it->second.second);
      cache.erase(it);
    }
  }

  void routes() {
    // httplib defaults to SO_REUSEPORT, which lets a second server share a
    // port that is already taken.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});

    http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    http.Get("/api/stats", [this](const httplib::Request& req, httplib::Response& res) {
      auto threshold = min_downloads_param(req);
      if (!threshold) return send_error(res, 422, "min_downloads must be a non-negative integer");
      auto [snapshot, _] = current();
      if (!snapshot) return send_error(res, 404, "no corpus loaded");
      const auto selected = corpus::filter_min_downloads(*snapshot, *threshold);
      res.set_content(analytics::to_json(analytics::summary_stats(selected)).dump(), kJson);
    });

    http.Get("/api/scatter", [this](const httplib::Request& req, httplib::Response& res) {
      auto threshold = min_downloads_param(req);
      if (!threshold) return send_error(res, 422, "min_downloads must be a non-negative integer");
      auto [snapshot, _] = current();
      if (!snapshot) return send_error(res, 404, "no corpus loaded");
      const auto selected = corpus::filter_min_downloads(*snapshot, *threshold);
      res.set_content(analytics::to_json(analytics::scatter_points(selected)).dump(), kJson);
    });

    http.Post("/api/atlas", [this](const httplib::Request& req, httplib::Response& res) {
      atlas::AtlasQuery query;
      try {
        const json body = req.body.empty() ? json::object() : json::parse(req.body);
        query = atlas::query_from_json(body);
      } catch (const json::exception& e) {
        return send_error(res, 422, std::string("invalid JSON body: ") + e.what());
      } catch (const ArgumentError& e) {
        return send_error(res, 422, e.what());
      }

      auto [snapshot, gen] = current();
      if (!snapshot) return send_error(res, 404, "no corpus loaded");
      const std::size_t selected = corpus::filter_min_downloads(*snapshot, query.min_downloads).size();
      if (query.k > selected) {
        return send_error(res, 409, "k exceeds filtered model count (" + std::to_string(query.k) + " > " +
                                        std::to_string(selected) + ")");
      }

      auto fut = bundle_future(snapshot, gen, query);
      try {
        res.set_content(*fut.get(), kJson);
      } catch (const EmptySelectionError& e) {
        forget(gen, query);
        send_error(res, 409, e.what());
      } catch (const ClusterCountError& e) {
        forget(gen, query);
        send_error(res, 409, e.what());
      } catch (const std::exception& e) {
        forget(gen, query);
        send_error(res, 500, e.what());
      }
    });

    if (config.static_dir && !http.set_mount_point("/", config.static_dir->string())) {
      throw ArgumentError("static directory not found: " + config.static_dir->string());
    }
  }
};

AtlasServer::AtlasServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

AtlasServer::~AtlasServer() {
  stop();
}

void AtlasServer::load() {
  if (!impl_->config.corpus_path) throw ArgumentError("no corpus path configured");
  impl_->load_file();
}

void AtlasServer::set_corpus(corpus::Corpus corpus) { impl_->install(std::move(corpus), std::nullopt); }

int AtlasServer::bind() {
  auto& cfg = impl_->config;
  int port = cfg.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(cfg.host);
    if (port < 0) throw BindError("cannot bind " + cfg.host + " to an ephemeral port");
  } else if (!impl_->http.bind_to_port(cfg.host, port)) {
    throw BindError("cannot bind " + cfg.host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return port;
}

void AtlasServer::listen() {
  if (!impl_->bound) throw Error("listen() called before bind()");
  impl_->http.listen_after_bind();
}

void AtlasServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

std::size_t AtlasServer::computations() const { return impl_->computations.load(); }

}  // namespace constellation::server
