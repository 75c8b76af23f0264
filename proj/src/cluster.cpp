#include "constellation/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "constellation/error.hpp"
#include "numfmt.hpp"

namespace constellation::cluster {

namespace {

struct EdgeKey {
  double dist = std::numeric_limits<double>::infinity();
  std::size_t a = std::numeric_limits<std::size_t>::max();
  std::size_t b = std::numeric_limits<std::size_t>::max();

  bool operator<(const EdgeKey& o) const { return std::tie(dist, a, b) < std::tie(o.dist, o.a, o.b); }
};

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Attaches b's root under a's root; returns the surviving root.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    parent_[b] = a;
    return a;
  }

private:
  std::vector<std::size_t> parent_;
};

void validate(const textfeat::DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = dist(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ArgumentError("distance out of [0, 1] at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
      if (v != dist(j, i)) {
        throw ArgumentError("distance matrix not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

Dendrogram single_linkage(const textfeat::DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  if (n == 0) throw EmptyInputError("single linkage needs at least one point");
  validate(dist);

  Dendrogram tree;
  tree.leaf_count = n;
  if (n == 1) return tree;

  // Prim's algorithm under the strict total order EdgeKey, so the spanning
  // tree is unique even with tied distances.
  std::vector<EdgeKey> best(n);
  std::vector<bool> in_tree(n, false);
  std::vector<EdgeKey> mst;
  mst.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      EdgeKey cand{dist(std::min(current, v), std::max(current, v)), std::min(current, v),
                   std::max(current, v)};
      if (cand < best[v]) best[v] = cand;
      if (next == n || best[v] < best[next]) next = v;
    }
    in_tree[next] = true;
    mst.push_back(best[next]);
    current = next;
  }

  std::sort(mst.begin(), mst.end());

  DisjointSets sets(n);
  std::vector<std::size_t> node_of(n);  // set root -> dendrogram node id
  std::vector<std::size_t> size_of(n, 1);
  std::iota(node_of.begin(), node_of.end(), 0);
  tree.merges.reserve(n - 1);
  for (const auto& e : mst) {
    const std::size_t ra = sets.find(e.a);
    const std::size_t rb = sets.find(e.b);
    Merge m{node_of[ra], node_of[rb], e.dist, size_of[ra] + size_of[rb]};
    const std::size_t root = sets.unite(ra, rb);
    node_of[root] = n + tree.merges.size();
    size_of[root] = m.size;
    tree.merges.push_back(m);
  }
  return tree;
}

FlatClustering cut(const Dendrogram& d, std::size_t k) {
  const std::size_t n = d.leaf_count;
  if (k < 1 || k > n) {
    throw ArgumentError("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  // Map every node to a representative leaf, then union the first n-k merges.
  std::vector<std::size_t> rep(d.node_count());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
  DisjointSets sets(n);
  for (std::size_t i = 0; i < d.merges.size(); ++i) {
    const auto& m = d.merges[i];
    rep[n + i] = rep[m.left];
    if (i < n - k) sets.unite(rep[m.left], rep[m.right]);
  }

  FlatClustering flat;
  flat.k = k;
  flat.labels.assign(n, 0);
  std::vector<std::size_t> label_of_root(n, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    auto& label = label_of_root[sets.find(leaf)];
    if (label == std::numeric_limits<std::size_t>::max()) label = next++;
    flat.labels[leaf] = label;
  }
  return flat;
}

std::vector<std::size_t> cluster_sizes(const FlatClustering& f) {
  std::vector<std::size_t> sizes(f.k, 0);
  for (std::size_t label : f.labels) ++sizes.at(label);
  return sizes;
}

std::string newick_label(const std::string& name) {
  if (name.find_first_of(" ,():;'") == std::string::npos) return name;
  std::string out = "'";
  for (char c : name) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

namespace {

// Iterative writer; single-linkage trees over names can be chains thousands
// of levels deep.
template <typename Tree>
std::string write_newick(const Tree& tree, typename Tree::Node root) {
  using Node = typename Tree::Node;
  struct Frame {
    Node node;
    double parent_height;
    bool has_parent;
    std::size_t next_child;
  };
  std::string out;
  std::vector<Frame> stack{{root, 0.0, false, 0}};
  while (!stack.empty()) {
    auto& f = stack.back();
    const auto children = tree.children(f.node);
    if (!children.empty() && f.next_child < children.size()) {
      out += f.next_child == 0 ? '(' : ',';
      Node child = children[f.next_child++];
      stack.push_back({child, tree.height(f.node), true, 0});
      continue;
    }
    if (!children.empty()) out += ')';
    out += newick_label(tree.name(f.node));
    if (f.has_parent) {
      out += ':';
      out += detail::format_real(f.parent_height - tree.height(f.node));
    }
    stack.pop_back();
  }
  out += ';';
  return out;
}

struct DendrogramView {
  using Node = std::size_t;
  const Dendrogram& d;
  const std::vector<std::string>& labels;

  std::vector<Node> children(Node node) const {
    if (d.is_leaf(node)) return {};
    const auto& m = d.merges[node - d.leaf_count];
    return {m.left, m.right};
  }
  double height(Node node) const { return d.height(node); }
  std::string name(Node node) const { return d.is_leaf(node) ? labels[node] : std::string(); }
};

struct JsonTreeView {
  using Node = const nlohmann::json*;

  std::vector<Node> children(Node node) const {
    std::vector<Node> out;
    if (auto it = node->find("children"); it != node->end()) {
      for (const auto& c : *it) out.push_back(&c);
    }
    return out;
  }
  double height(Node node) const { return node->value("height", 0.0); }
  std::string name(Node node) const { return node->value("name", std::string()); }
};

}  // namespace

std::string to_newick(const Dendrogram& d, const std::vector<std::string>& labels) {
  if (labels.size() != d.leaf_count) throw ArgumentError("label count does not match leaf count");
  if (d.leaf_count == 0) return ";";
  return write_newick(DendrogramView{d, labels}, d.root());
}

nlohmann::json to_nested_json(const Dendrogram& d, const std::vector<std::string>& labels,
                              const corpus::Corpus& records) {
  using nlohmann::json;
  if (labels.size() != d.leaf_count) throw ArgumentError("label count does not match leaf count");
  if (!records.empty() && records.size() != d.leaf_count) {
    throw ArgumentError("record count does not match leaf count");
  }
  if (d.leaf_count == 0) return json::object();

  std::vector<json> nodes(d.node_count());
  for (std::size_t leaf = 0; leaf < d.leaf_count; ++leaf) {
    json node{{"name", labels[leaf]}, {"height", 0.0}, {"children", json::array()}};
    if (!records.empty()) {
      const auto& rec = records.records[leaf];
      auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
      node["meta"] = {{"downloads", opt(rec.downloads)},
                      {"likes", opt(rec.likes)},
                      {"params_millions", opt(rec.params_millions)}};
    }
    nodes[leaf] = std::move(node);
  }
  for (std::size_t i = 0; i < d.merges.size(); ++i) {
    const auto& m = d.merges[i];
    json children = json::array();
    children.push_back(std::move(nodes[m.left]));
    children.push_back(std::move(nodes[m.right]));
    nodes[d.leaf_count + i] = json{{"height", m.height}, {"children", std::move(children)}};
  }
  return std::move(nodes[d.root()]);
}

std::string newick_from_nested_json(const nlohmann::json& tree) {
  if (!tree.is_object() || tree.empty()) return ";";
  return write_newick(JsonTreeView{}, &tree);
}

}  // namespace constellation::cluster
