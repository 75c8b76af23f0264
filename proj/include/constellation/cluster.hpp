#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "constellation/corpus.hpp"
#include "constellation/textfeat.hpp"

namespace constellation::cluster {

struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;

  bool operator==(const Merge&) const = default;
};

/// Binary merge tree. Leaves are 0..n-1; merge i creates node n+i.
struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;

  std::size_t node_count() const noexcept { return leaf_count + merges.size(); }
  bool is_leaf(std::size_t node) const noexcept { return node < leaf_count; }
  double height(std::size_t node) const {
    return is_leaf(node) ? 0.0 : merges[node - leaf_count].height;
  }
  std::size_t root() const { return node_count() - 1; }
};

struct FlatClustering {
  std::vector<std::size_t> labels;  // leaf id -> cluster label
  std::size_t k = 0;
};

/// Single-linkage agglomeration over a square distance matrix.
///
/// Builds the minimum spanning tree with Prim's algorithm in O(n^2), ordering
/// candidate edges by (distance, min leaf id, max leaf id), then replays the
/// tree edges in that order. The result equals naive agglomeration where the
/// closest pair of clusters merges first and ties go to the lexicographically
/// smallest leaf pair. Each merge's left child is the cluster holding the
/// smaller leaf of that pair.
///
/// Only the upper triangle is read. Throws EmptyInputError for n == 0 and
/// ArgumentError when an off-diagonal entry lies outside [0, 1] or the
/// matrix is not symmetric.
Dendrogram single_linkage(const textfeat::DistanceMatrix& dist);

/// Undo the last k-1 merges; labels follow each cluster's smallest leaf id.
FlatClustering cut(const Dendrogram& d, std::size_t k);

std::vector<std::size_t> cluster_sizes(const FlatClustering& f);

/// Newick text. A child's branch length is parent height minus child height.
std::string to_newick(const Dendrogram& d, const std::vector<std::string>& labels);

/// Nested tree document: {name?, height, children[], meta?}. Leaves carry
/// `name` and `meta{downloads, likes, params_millions}`. `records` may be
/// empty, in which case leaves get no `meta`.
nlohmann::json to_nested_json(const Dendrogram& d, const std::vector<std::string>& labels,
                              const corpus::Corpus& records);

/// Regenerates Newick text from a nested tree document.
std::string newick_from_nested_json(const nlohmann::json& tree);

/// Quotes a Newick label when it contains any of ` ,():;'`.
std::string newick_label(const std::string& name);

}  // namespace constellation::cluster
