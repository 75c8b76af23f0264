#include "constellation/atlas.hpp"

#include <fstream>

#include "constellation/analytics.hpp"
#include "constellation/cluster.hpp"
#include "constellation/error.hpp"
#include "constellation/graphkit.hpp"
#include "constellation/textfeat.hpp"

namespace constellation::atlas {

using nlohmann::json;

void validate(const AtlasQuery& query) {
  if (query.k < 1) throw ArgumentError("k must be at least 1");
  if (!(query.threshold >= 0.0 && query.threshold <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
}

json to_json(const AtlasQuery& query) {
  return {{"min_downloads", query.min_downloads},
          {"k", query.k},
          {"threshold", query.threshold},
          {"seed", query.seed}};
}

namespace {

std::uint64_t non_negative(const json& doc, const char* key, std::uint64_t fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return it->get<std::uint64_t>();
  throw ArgumentError(std::string(key) + " must be a non-negative integer");
}

}  // namespace

AtlasQuery query_from_json(const json& doc) {
  if (!doc.is_object()) throw ArgumentError("query must be a JSON object");
  AtlasQuery q;
  q.min_downloads = non_negative(doc, "min_downloads", q.min_downloads);
  q.k = static_cast<std::size_t>(non_negative(doc, "k", q.k));
  if (auto it = doc.find("threshold"); it != doc.end()) {
    if (!it->is_number()) throw ArgumentError("threshold must be a number");
    q.threshold = it->get<double>();
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (it->is_number_unsigned()) {
      q.seed = it->get<std::uint64_t>();
    } else if (it->is_number_integer()) {
      q.seed = static_cast<std::uint64_t>(it->get<std::int64_t>());
    } else {
      throw ArgumentError("seed must be an integer");
    }
  }
  validate(q);
  return q;
}

Atlas compute_atlas(const corpus::Corpus& corpus, const AtlasQuery& query, const AtlasOptions& options) {
  validate(query);
  const corpus::Corpus selected = corpus::filter_min_downloads(corpus, query.min_downloads);
  const std::size_t n = selected.size();
  if (n == 0) throw EmptySelectionError("no models above threshold");
  if (query.k > n) {
    throw ClusterCountError("k exceeds filtered model count (" + std::to_string(query.k) + " > " +
                            std::to_string(n) + ")");
  }

  const auto names = corpus::model_names(selected);
  const auto features = textfeat::tfidf(names);
  const auto sim = textfeat::cosine_similarity(features);

  const auto tree = cluster::single_linkage(textfeat::cosine_distance(sim));
  const auto flat = cluster::cut(tree, query.k);

  const auto graph = graphkit::build_graph(sim, names, query.threshold);
  const auto communities = graphkit::louvain(graph, query.seed);
  graphkit::LayoutOptions layout_options;
  layout_options.iterations = options.layout_iterations;
  layout_options.seed = query.seed;
  const auto layout = graphkit::layout_fr(graph, layout_options);
  const auto centroids = graphkit::community_centroids(layout, communities);

  Atlas atlas;
  atlas.model_count = n;
  atlas.cluster_count = flat.k;
  atlas.community_count = communities.community_count();

  atlas.stats = analytics::to_json(analytics::summary_stats(selected));
  atlas.newick = cluster::to_newick(tree, names);
  atlas.tree = cluster::to_nested_json(tree, names, selected);
  atlas.graph = graphkit::export_graph_json(graph, communities, layout, centroids, selected);

  auto global = analytics::word_frequencies(names);
  atlas.wordclouds = {
      {"granularity", "words"},
      {"cluster_sizes", cluster::cluster_sizes(flat)},
      {"global", analytics::to_json(analytics::truncate(global, options.words_per_cluster))},
      {"clusters", analytics::to_json(analytics::cluster_word_tables(selected, flat, options.words_per_cluster))}};
  atlas.scatter = analytics::to_json(analytics::scatter_points(selected));
  return atlas;
}

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names = {"stats.json", "tree.newick",     "tree.json",
                                                 "graph.json", "wordclouds.json", "scatter.json"};
  return names;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

void write_artifacts(const Atlas& atlas, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "stats.json", atlas.stats.dump(2) + "\n");
  write_file(dir / "tree.newick", atlas.newick + "\n");
  write_file(dir / "tree.json", atlas.tree.dump() + "\n");
  write_file(dir / "graph.json", atlas.graph.dump() + "\n");
  write_file(dir / "wordclouds.json", atlas.wordclouds.dump(2) + "\n");
  write_file(dir / "scatter.json", atlas.scatter.dump(2) + "\n");
}

json bundle_json(const Atlas& atlas, const AtlasQuery& query, const std::string& computed_at) {
  return {{"query", to_json(query)},   {"computed_at", computed_at}, {"stats", atlas.stats},
          {"tree", atlas.tree},        {"graph", atlas.graph},       {"wordclouds", atlas.wordclouds},
          {"scatter", atlas.scatter}};
}

}  // namespace constellation::atlas
