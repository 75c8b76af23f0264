#include "constellation/cli.hpp"

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "constellation/corpus.hpp"
#include "constellation/error.hpp"
#include "constellation/server.hpp"
#include "constellation/textfeat.hpp"

namespace constellation::cli {

namespace {

corpus::Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read input " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto c = corpus::parse_csv(buf.str());
  c.snapshot_label = path.stem().string();
  return c;
}

}  // namespace

int cmd_fetch(const FetchCommand& cmd, std::ostream& out, std::ostream& err) {
  std::vector<hub::Listing> listings;
  try {
    listings = hub::fetch_listings(cmd.fetch, cmd.tag);
  } catch (const FetchError& e) {
    err << "fetch: " << e.what() << '\n';
    return kNetwork;
  } catch (const ParseError& e) {
    err << "fetch: " << e.what() << '\n';
    return kNetwork;
  } catch (const ArgumentError& e) {
    err << "fetch: " << e.what() << '\n';
    return kUsage;
  }
  const auto snap = hub::snapshot(listings, cmd.label);
  const std::string csv = corpus::to_csv(snap);
  if (!cmd.output) {
    out << csv;
    return kOk;
  }
  std::ofstream file(*cmd.output, std::ios::binary | std::ios::trunc);
  if (!file || !(file << csv)) {
    err << "fetch: cannot write " << cmd.output->string() << '\n';
    return kUsage;
  }
  err << "fetched " << snap.size() << " models into " << cmd.output->string() << '\n';
  return kOk;
}

int cmd_atlas(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  if (config.input_csv.empty()) {
    err << "atlas: no input; pass --input or set " << kDataEnv << '\n';
    return kUsage;
  }
  try {
    const auto corpus = read_corpus(config.input_csv);
    atlas::AtlasOptions options;
    options.layout_iterations = config.layout_iterations;
    const auto result = atlas::compute_atlas(corpus, config.query, options);
    atlas::write_artifacts(result, config.output_dir);
    if (config.dump_tfidf) {
      const auto selected = corpus::filter_min_downloads(corpus, config.query.min_downloads);
      std::ofstream dump(config.output_dir / "tfidf.csv", std::ios::binary | std::ios::trunc);
      dump << textfeat::dump_triples(textfeat::tfidf(corpus::model_names(selected)));
    }
    out << "models=" << result.model_count << " clusters=" << result.cluster_count
        << " communities=" << result.community_count << " out=" << config.output_dir.string() << '\n';
    return kOk;
  } catch (const EmptySelectionError& e) {
    err << "atlas: " << e.what() << '\n';
    return kEmptySelection;
  } catch (const ClusterCountError& e) {
    err << "atlas: " << e.what() << '\n';
    return kBadClusterCount;
  } catch (const std::exception& e) {
    err << "atlas: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_serve(const ServeCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.input_csv.empty()) {
    err << "serve: no input; pass --input or set " << kDataEnv << '\n';
    return kUsage;
  }
  server::ServerConfig config;
  config.corpus_path = cmd.input_csv;
  config.static_dir = cmd.static_dir;
  config.host = cmd.host;
  config.port = cmd.port;
  config.atlas_options.layout_iterations = cmd.layout_iterations;

  // Block termination signals before the server spawns worker threads, then
  // wait for them on a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    server::AtlasServer srv(config);
    srv.load();
    int port = 0;
    try {
      port = srv.bind();
    } catch (const server::BindError& e) {
      err << "serve: " << e.what() << '\n';
      return kBindFailure;
    }
    out << "listening on http://" << cmd.host << ':' << port << '\n' << std::flush;

    std::atomic<bool> done{false};
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      if (!done) srv.stop();
    });
    srv.listen();
    done = true;
    kill(getpid(), SIGTERM);  // release the waiter if listen ended on its own
    waiter.join();
    out << "stopped\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "serve: " << e.what() << '\n';
    return kUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Organise model-hub metadata into an atlas of name families"};
  app.require_subcommand(1);

  FetchCommand fetch;
  std::size_t max_pages = 0;
  std::int64_t backoff_ms = fetch.fetch.backoff_initial.count();
  std::int64_t timeout_ms = fetch.fetch.request_timeout.count();
  std::string fetch_out;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download a listing snapshot as CSV");
  fetch_cmd->add_option("--base-url", fetch.fetch.base_url, "Hub endpoint")->capture_default_str();
  auto* max_pages_opt = fetch_cmd->add_option("--max-pages", max_pages, "Stop after this many pages");
  fetch_cmd->add_option("--page-size", fetch.fetch.page_size, "Models per page")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fetch_cmd->add_option("--tag", fetch.tag, "Pipeline tag")->capture_default_str();
  fetch_cmd->add_option("--retries", fetch.fetch.retry_limit, "Retry limit")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  fetch_cmd->add_option("--backoff-ms", backoff_ms, "Initial retry backoff")->capture_default_str();
  fetch_cmd->add_option("--timeout-ms", timeout_ms, "Request timeout")->capture_default_str();
  fetch_cmd->add_option("--link-base", fetch.fetch.link_base, "Prefix for model links")->capture_default_str();
  fetch_cmd->add_option("--label", fetch.label, "Snapshot label");
  fetch_cmd->add_option("--out", fetch_out, "Output CSV (stdout if omitted)");

  PipelineConfig pipeline;
  std::string atlas_input;
  std::string atlas_out = pipeline.output_dir.string();
  auto* atlas_cmd = app.add_subcommand("atlas", "Compute the atlas artifacts from a snapshot CSV");
  atlas_cmd->add_option("--input", atlas_input, "Snapshot CSV")->envname(kDataEnv);
  atlas_cmd->add_option("--min-downloads", pipeline.query.min_downloads, "Download filter")->capture_default_str();
  atlas_cmd->add_option("--clusters", pipeline.query.k, "Flat cluster count")->capture_default_str();
  atlas_cmd->add_option("--threshold", pipeline.query.threshold, "Edge similarity threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  atlas_cmd->add_option("--iterations", pipeline.layout_iterations, "Layout iterations")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  atlas_cmd->add_option("--seed", pipeline.query.seed, "Seed for community order and layout")->capture_default_str();
  atlas_cmd->add_option("--out", atlas_out, "Output directory")->capture_default_str();
  atlas_cmd->add_flag("--dump-tfidf", pipeline.dump_tfidf, "Also write tfidf.csv triples");

  ServeCommand serve;
  std::string serve_input;
  std::string static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--input", serve_input, "Snapshot CSV")->envname(kDataEnv);
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port (0 = ephemeral)")->capture_default_str();
  serve_cmd->add_option("--static-dir", static_dir, "UI assets to serve at /");
  serve_cmd->add_option("--iterations", serve.layout_iterations, "Layout iterations")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsage;
  }

  if (*fetch_cmd) {
    if (*max_pages_opt) fetch.fetch.max_pages = max_pages;
    fetch.fetch.backoff_initial = std::chrono::milliseconds(backoff_ms);
    fetch.fetch.request_timeout = std::chrono::milliseconds(timeout_ms);
    if (!fetch_out.empty()) fetch.output = fetch_out;
    return cmd_fetch(fetch, out, err);
  }
  if (*atlas_cmd) {
    if (pipeline.query.k < 1) {
      err << "atlas: --clusters must be at least 1\n";
      return kBadClusterCount;
    }
    pipeline.input_csv = atlas_input;
    pipeline.output_dir = atlas_out;
    return cmd_atlas(pipeline, out, err);
  }
  serve.input_csv = serve_input;
  if (serve_input.empty()) {
    err << "serve: no input; pass --input or set " << kDataEnv << "\n" << serve_cmd->help();
    return kUsage;
  }
  if (!static_dir.empty()) serve.static_dir = static_dir;
  return cmd_serve(serve, out, err);
}

}  // namespace constellation::cli
