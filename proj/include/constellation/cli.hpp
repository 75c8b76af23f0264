#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "constellation/atlas.hpp"
#include "constellation/hub_client.hpp"

namespace constellation::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNetwork = 2,
  kEmptySelection = 3,
  kBadClusterCount = 4,
  kBindFailure = 5,
};

inline constexpr const char* kDataEnv = "CONSTELLATION_DATA";

struct PipelineConfig {
  std::filesystem::path input_csv;
  atlas::AtlasQuery query;  // min_downloads, k, threshold, seed
  int layout_iterations = atlas::kDefaultIterations;
  std::filesystem::path output_dir = "atlas";
  bool dump_tfidf = false;
};

struct FetchCommand {
  hub::FetchConfig fetch;
  std::string tag = "text-generation";
  std::optional<std::filesystem::path> output;  // stdout when absent
  std::string label;
};

struct ServeCommand {
  std::filesystem::path input_csv;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  int layout_iterations = atlas::kDefaultIterations;
};

int cmd_fetch(const FetchCommand& cmd, std::ostream& out, std::ostream& err);

/// Runs the full pipeline and writes the six artifacts into output_dir.
int cmd_atlas(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Serves until SIGINT or SIGTERM.
int cmd_serve(const ServeCommand& cmd, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace constellation::cli
