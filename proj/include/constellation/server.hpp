#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "constellation/atlas.hpp"
#include "constellation/corpus.hpp"
#include "constellation/error.hpp"

namespace constellation::server {

class BindError : public Error {
public:
  using Error::Error;
};

struct ServerConfig {
  // Snapshot CSV; re-read whenever its size or mtime changes.
  std::optional<std::filesystem::path> corpus_path;
  // Static UI assets mounted at "/".
  std::optional<std::filesystem::path> static_dir;
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks an ephemeral port
  std::size_t cache_capacity = 16;
  atlas::AtlasOptions atlas_options;
};

/// JSON API over the atlas pipeline.
///
///   GET  /healthz                     -> "ok"
///   GET  /api/stats?min_downloads=M   -> summary statistics
///   GET  /api/scatter?min_downloads=M -> log-log scatter points
///   POST /api/atlas                   -> full bundle for an AtlasQuery body
///
/// Bundles are cached per (corpus generation, query) in an LRU; concurrent
/// identical requests share one computation. Atlas work runs off the
/// request threads, so health and stats stay responsive.
class AtlasServer {
public:
  explicit AtlasServer(ServerConfig config);
  ~AtlasServer();

  AtlasServer(const AtlasServer&) = delete;
  AtlasServer& operator=(const AtlasServer&) = delete;

  /// Loads the configured corpus file. Throws on unreadable or invalid CSV.
  void load();

  /// Replaces the corpus in memory (used when no file backs the server).
  void set_corpus(corpus::Corpus corpus);

  /// Binds the listening socket and returns the port. Throws BindError.
  int bind();

  /// Serves until stop() is called. bind() must have succeeded.
  void listen();

  void stop();

  /// Number of atlas computations started so far.
  std::size_t computations() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace constellation::server
