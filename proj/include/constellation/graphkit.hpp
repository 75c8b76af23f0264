#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "constellation/corpus.hpp"
#include "constellation/textfeat.hpp"

namespace constellation::graphkit {

inline constexpr double kDefaultThreshold = 0.2;

struct Node {
  std::size_t id = 0;
  std::string name;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::size_t source = 0;  // source < target
  std::size_t target = 0;
  double weight = 0.0;
  bool operator==(const Edge&) const = default;
};

/// Undirected similarity graph. Edges are sorted by (source, target).
struct SimilarityGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t node_count() const noexcept { return nodes.size(); }
  double total_weight() const;
  bool operator==(const SimilarityGraph&) const = default;
};

/// Community id per node; ids are dense 0..c-1 and numbered in order of
/// each community's smallest node id.
struct Partition {
  std::vector<std::size_t> community;

  std::size_t community_count() const;
  bool operator==(const Partition&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Layout {
  std::vector<Point> positions;
  double width = 1.0;
  double height = 1.0;
  bool operator==(const Layout&) const = default;
};

struct CommunityInfo {
  std::size_t id = 0;
  std::size_t size = 0;
  double cx = 0.0;
  double cy = 0.0;
};

using CommunitySummary = std::vector<CommunityInfo>;

/// Edge (i, j) iff i < j and sim(i, j) > threshold; all nodes kept.
SimilarityGraph build_graph(const textfeat::SimilarityMatrix& sim,
                            const std::vector<std::string>& names,
                            double threshold = kDefaultThreshold);

/// Weighted Newman modularity. Throws UndefinedError for an edgeless graph.
double modularity(const SimilarityGraph& g, const Partition& p);

/// Relabels communities densely in order of first appearance by node id.
Partition normalize(const Partition& p);

/// Louvain modularity maximisation.
///
/// Each level visits nodes in a seeded shuffle, moving a node to the
/// neighbouring community with the largest positive gain (ties to the
/// smallest community id, staying put wins a tie with the current one),
/// until a sweep makes no move. Communities then collapse into super-nodes
/// and the process repeats until a level brings no improvement. The result
/// is finally polished by node-level moves so that no single-node move can
/// raise modularity.
Partition louvain(const SimilarityGraph& g, std::uint64_t seed);

struct LayoutOptions {
  int iterations = 50;
  std::uint64_t seed = 42;
  double width = 1.0;
  double height = 1.0;
  // Scale attraction by edge weight; false gives the classic unweighted force.
  bool weighted = true;
  // Called after every iteration with the iteration index and positions.
  std::function<void(int, const Layout&)> observer;
};

/// Seeded uniform positions inside the frame.
Layout initial_layout(std::size_t node_count, const LayoutOptions& options);

/// Fruchterman-Reingold force-directed layout.
///
/// k = sqrt(W * H / n); repulsion k^2 / d between every pair, attraction
/// d^2 / k along edges (times the edge weight when `weighted`). Displacement
/// is capped by a temperature cooling linearly from W / 10 towards 0, and
/// positions are clamped into the frame. Coincident nodes are pushed apart
/// by a seeded jitter.
Layout layout_fr(const SimilarityGraph& g, const LayoutOptions& options = {});

/// Same as layout_fr but starting from the given positions.
Layout layout_fr_from(const SimilarityGraph& g, Layout start, const LayoutOptions& options);

CommunitySummary community_centroids(const Layout& l, const Partition& p);

/// {nodes:[{id,name,downloads,likes,params_millions,community,x,y}],
///  edges:[{source,target,weight}], communities:[{id,size,cx,cy}]}
nlohmann::json export_graph_json(const SimilarityGraph& g, const Partition& p, const Layout& l,
                                 const CommunitySummary& summary, const corpus::Corpus& records);

struct GraphDocument {
  SimilarityGraph graph;
  Partition partition;
  Layout layout;
  CommunitySummary summary;
};

/// Inverse of export_graph_json. The layout frame is not part of the
/// document and is left at its default.
GraphDocument parse_graph_json(const nlohmann::json& doc);

}  // namespace constellation::graphkit
