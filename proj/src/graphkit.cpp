#include "constellation/graphkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "constellation/error.hpp"
#include "rng.hpp"

namespace constellation::graphkit {

using nlohmann::json;

double SimilarityGraph::total_weight() const {
  double m = 0.0;
  for (const auto& e : edges) m += e.weight;
  return m;
}

std::size_t Partition::community_count() const {
  if (community.empty()) return 0;
  return *std::max_element(community.begin(), community.end()) + 1;
}

SimilarityGraph build_graph(const textfeat::SimilarityMatrix& sim, const std::vector<std::string>& names,
                            double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
  if (names.size() != sim.size()) throw ArgumentError("name count does not match matrix size");
  SimilarityGraph g;
  const std::size_t n = sim.size();
  g.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({i, names[i]});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = sim(i, j);
      if (w > threshold) g.edges.push_back({i, j, w});
    }
  }
  return g;
}

Partition normalize(const Partition& p) {
  Partition out;
  out.community.resize(p.community.size());
  std::vector<std::size_t> relabel;
  std::size_t next = 0;
  for (std::size_t i = 0; i < p.community.size(); ++i) {
    const std::size_t c = p.community[i];
    if (c >= relabel.size()) relabel.resize(c + 1, std::numeric_limits<std::size_t>::max());
    if (relabel[c] == std::numeric_limits<std::size_t>::max()) relabel[c] = next++;
    out.community[i] = relabel[c];
  }
  return out;
}

namespace {

// Weighted graph with self-loops, as seen by one Louvain level. self_loop[i]
// is A_ii, i.e. twice the edge weight folded inside a super-node.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }

  void finish() {
    degree.assign(size(), 0.0);
    two_m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      double k = self_loop[i];
      for (const auto& [j, w] : adj[i]) k += w;
      degree[i] = k;
      two_m += k;
    }
  }
};

LevelGraph from_similarity_graph(const SimilarityGraph& g) {
  LevelGraph lg;
  lg.adj.resize(g.node_count());
  lg.self_loop.assign(g.node_count(), 0.0);
  for (const auto& e : g.edges) {
    lg.adj[e.source].emplace_back(e.target, e.weight);
    lg.adj[e.target].emplace_back(e.source, e.weight);
  }
  lg.finish();
  return lg;
}

// Collapses communities (already dense ids) into super-nodes.
LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& comm, std::size_t count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  std::vector<double> row(count, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < g.size(); ++i) members[comm[i]].push_back(i);

  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i : members[c]) {
      out.self_loop[c] += g.self_loop[i];
      for (const auto& [j, w] : g.adj[i]) {
        const std::size_t d = comm[j];
        if (d == c) {
          out.self_loop[c] += w;
          continue;
        }
        if (row[d] == 0.0) touched.push_back(d);
        row[d] += w;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t d : touched) {
      out.adj[c].emplace_back(d, row[d]);
      row[d] = 0.0;
    }
    touched.clear();
  }
  out.finish();
  return out;
}

// Phase one: sweeps of greedy node moves until a sweep moves nothing.
// Returns whether any node changed community.
bool local_moving(const LevelGraph& g, std::vector<std::size_t>& comm, detail::Rng& rng) {
  const std::size_t n = g.size();
  if (g.two_m <= 0.0) return false;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  // Moves must beat staying put by more than rounding noise.
  const double eps = 1e-13 * g.two_m;
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> neighbours;
  bool moved_any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i : order) {
      const std::size_t old_comm = comm[i];
      const double k_i = g.degree[i];

      for (const auto& [j, w] : g.adj[i]) {
        const std::size_t c = comm[j];
        if (link[c] == 0.0) neighbours.push_back(c);
        link[c] += w;
      }
      tot[old_comm] -= k_i;

      auto gain = [&](std::size_t c) { return link[c] - tot[c] * k_i / g.two_m; };
      std::size_t best = old_comm;
      double best_gain = gain(old_comm);
      std::sort(neighbours.begin(), neighbours.end());
      for (std::size_t c : neighbours) {
        if (c == old_comm) continue;
        const double gc = gain(c);
        if (gc > best_gain + eps) {
          best = c;
          best_gain = gc;
        }
      }

      tot[best] += k_i;
      comm[i] = best;
      if (best != old_comm) moved = moved_any = true;
      for (std::size_t c : neighbours) link[c] = 0.0;
      neighbours.clear();
    }
  }
  return moved_any;
}

std::vector<std::size_t> dense_ids(std::vector<std::size_t> comm, std::size_t& count) {
  Partition p = normalize(Partition{std::move(comm)});
  count = p.community_count();
  return std::move(p.community);
}

}  // namespace

double modularity(const SimilarityGraph& g, const Partition& p) {
  if (p.community.size() != g.node_count()) throw ArgumentError("partition does not cover the graph");
  const double m = g.total_weight();
  if (g.edges.empty() || m <= 0.0) throw UndefinedError("modularity is undefined on an edgeless graph");

  const std::size_t c = p.community_count();
  std::vector<double> internal(c, 0.0);  // sum of A_ij over ordered pairs inside
  std::vector<double> tot(c, 0.0);
  for (const auto& e : g.edges) {
    tot[p.community[e.source]] += e.weight;
    tot[p.community[e.target]] += e.weight;
    if (p.community[e.source] == p.community[e.target]) internal[p.community[e.source]] += 2.0 * e.weight;
  }
  const double two_m = 2.0 * m;
  double q = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double share = tot[k] / two_m;
    q += internal[k] / two_m - share * share;
  }
  return q;
}

Partition louvain(const SimilarityGraph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  Partition result;
  result.community.resize(n);
  std::iota(result.community.begin(), result.community.end(), 0);
  if (n == 0 || g.edges.empty()) return result;

  detail::Rng rng(seed);
  const LevelGraph base = from_similarity_graph(g);

  std::vector<std::size_t> node_comm = result.community;
  while (true) {
    local_moving(base, node_comm, rng);
    std::size_t count = 0;
    node_comm = dense_ids(std::move(node_comm), count);

    bool improved_above = false;
    LevelGraph level = aggregate(base, node_comm, count);
    while (true) {
      std::vector<std::size_t> super(level.size());
      std::iota(super.begin(), super.end(), 0);
      if (!local_moving(level, super, rng)) break;
      improved_above = true;
      std::size_t next_count = 0;
      super = dense_ids(std::move(super), next_count);
      for (auto& c : node_comm) c = super[c];
      level = aggregate(level, super, next_count);
    }
    if (!improved_above) break;
  }

  result.community = std::move(node_comm);
  return normalize(result);
}

Layout initial_layout(std::size_t node_count, const LayoutOptions& options) {
  detail::Rng rng(options.seed);
  Layout l;
  l.width = options.width;
  l.height = options.height;
  l.positions.resize(node_count);
  for (auto& p : l.positions) {
    p.x = rng.uniform() * options.width;
    p.y = rng.uniform() * options.height;
  }
  return l;
}

Layout layout_fr_from(const SimilarityGraph& g, Layout l, const LayoutOptions& options) {
  const std::size_t n = g.node_count();
  if (options.iterations < 0) throw ArgumentError("iterations must be non-negative");
  if (!(options.width > 0.0 && options.height > 0.0)) throw ArgumentError("frame must have positive extent");
  if (l.positions.size() != n) throw ArgumentError("start layout does not match node count");
  l.width = options.width;
  l.height = options.height;
  if (n == 0) return l;

  const double k = std::sqrt(options.width * options.height / static_cast<double>(n));
  const double k2 = k * k;
  const double start_temp = options.width / 10.0;
  const double min_dist = 1e-9 * k;
  detail::Rng jitter(options.seed ^ 0x9E3779B97F4A7C15ULL);

  std::vector<Point> disp(n);
  auto& pos = l.positions;
  for (int it = 0; it < options.iterations; ++it) {
    const double temp =
        start_temp * (1.0 - static_cast<double>(it) / static_cast<double>(options.iterations));
    std::fill(disp.begin(), disp.end(), Point{});

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = pos[i].x - pos[j].x;
        double dy = pos[i].y - pos[j].y;
        double d = std::sqrt(dx * dx + dy * dy);
        if (d < min_dist) {
          double ax = 0.0;
          double ay = 0.0;
          double len = 0.0;
          while (len == 0.0) {
            ax = 2.0 * jitter.uniform() - 1.0;
            ay = 2.0 * jitter.uniform() - 1.0;
            len = std::sqrt(ax * ax + ay * ay);
          }
          dx = min_dist * ax / len;
          dy = min_dist * ay / len;
          d = min_dist;
        }
        const double f = k2 / d;
        disp[i].x += dx / d * f;
        disp[i].y += dy / d * f;
        disp[j].x -= dx / d * f;
        disp[j].y -= dy / d * f;
      }
    }

    for (const auto& e : g.edges) {
      const double dx = pos[e.source].x - pos[e.target].x;
      const double dy = pos[e.source].y - pos[e.target].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d == 0.0) continue;
      double f = d * d / k;
      if (options.weighted) f *= e.weight;
      disp[e.source].x -= dx / d * f;
      disp[e.source].y -= dy / d * f;
      disp[e.target].x += dx / d * f;
      disp[e.target].y += dy / d * f;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::sqrt(disp[i].x * disp[i].x + disp[i].y * disp[i].y);
      if (len > 0.0) {
        const double step = std::min(len, temp) / len;
        pos[i].x += disp[i].x * step;
        pos[i].y += disp[i].y * step;
      }
      pos[i].x = std::clamp(pos[i].x, 0.0, options.width);
      pos[i].y = std::clamp(pos[i].y, 0.0, options.height);
    }
    if (options.observer) options.observer(it, l);
  }
  return l;
}

Layout layout_fr(const SimilarityGraph& g, const LayoutOptions& options) {
  return layout_fr_from(g, initial_layout(g.node_count(), options), options);
}

CommunitySummary community_centroids(const Layout& l, const Partition& p) {
  if (l.positions.size() != p.community.size()) throw ArgumentError("layout and partition differ in size");
  const std::size_t c = p.community_count();
  CommunitySummary out(c);
  for (std::size_t i = 0; i < c; ++i) out[i].id = i;
  for (std::size_t i = 0; i < p.community.size(); ++i) {
    auto& info = out[p.community[i]];
    info.cx += l.positions[i].x;
    info.cy += l.positions[i].y;
    ++info.size;
  }
  for (auto& info : out) {
    if (info.size == 0) continue;
    info.cx /= static_cast<double>(info.size);
    info.cy /= static_cast<double>(info.size);
  }
  return out;
}

json export_graph_json(const SimilarityGraph& g, const Partition& p, const Layout& l,
                       const CommunitySummary& summary, const corpus::Corpus& records) {
  const std::size_t n = g.node_count();
  if (p.community.size() != n || l.positions.size() != n) {
    throw ArgumentError("graph, partition and layout cover different node sets");
  }
  if (!records.empty() && records.size() != n) throw ArgumentError("record count does not match graph");

  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json nodes = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json node{{"id", g.nodes[i].id},
              {"name", g.nodes[i].name},
              {"community", p.community[i]},
              {"x", l.positions[i].x},
              {"y", l.positions[i].y}};
    if (records.empty()) {
      node["downloads"] = nullptr;
      node["likes"] = nullptr;
      node["params_millions"] = nullptr;
    } else {
      const auto& rec = records.records[i];
      node["downloads"] = opt(rec.downloads);
      node["likes"] = opt(rec.likes);
      node["params_millions"] = opt(rec.params_millions);
    }
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"source", e.source}, {"target", e.target}, {"weight", e.weight}});
  }
  json communities = json::array();
  for (const auto& c : summary) {
    communities.push_back({{"id", c.id}, {"size", c.size}, {"cx", c.cx}, {"cy", c.cy}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"communities", std::move(communities)}};
}

GraphDocument parse_graph_json(const json& doc) {
  GraphDocument out;
  try {
    for (const auto& node : doc.at("nodes")) {
      out.graph.nodes.push_back({node.at("id").get<std::size_t>(), node.at("name").get<std::string>()});
      out.partition.community.push_back(node.at("community").get<std::size_t>());
      out.layout.positions.push_back({node.at("x").get<double>(), node.at("y").get<double>()});
    }
    for (const auto& e : doc.at("edges")) {
      out.graph.edges.push_back(
          {e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>(), e.at("weight").get<double>()});
    }
    for (const auto& c : doc.at("communities")) {
      out.summary.push_back({c.at("id").get<std::size_t>(), c.at("size").get<std::size_t>(),
                             c.at("cx").get<double>(), c.at("cy").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
  return out;
}

}  // namespace constellation::graphkit
