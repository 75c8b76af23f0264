#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <thread>

#include "constellation/analytics.hpp"
#include "constellation/atlas.hpp"
#include "constellation/cluster.hpp"
#include "constellation/corpus.hpp"
#include "constellation/error.hpp"
#include "constellation/graphkit.hpp"
#include "constellation/server.hpp"
#include "constellation/textfeat.hpp"

namespace py = pybind11;
using namespace constellation;

namespace {

using Rows = std::vector<std::vector<double>>;
using EdgeTuple = std::tuple<std::size_t, std::size_t, double>;
using MergeTuple = std::tuple<std::size_t, std::size_t, double, std::size_t>;

py::dict record_dict(const corpus::ModelRecord& r) {
  py::dict d;
  d["rank"] = r.rank;
  d["model_name"] = r.model_name;
  d["link"] = r.link;
  d["downloads"] = r.downloads;
  d["likes"] = r.likes;
  d["readme_link"] = r.readme_link;
  d["params_millions"] = r.params_millions;
  return d;
}

Rows rows_of(const textfeat::SquareMatrix& m) {
  Rows out(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

textfeat::SquareMatrix matrix_of(const Rows& rows) {
  textfeat::SquareMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw ArgumentError("matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

cluster::Dendrogram dendrogram_of(std::size_t leaves, const std::vector<MergeTuple>& merges) {
  cluster::Dendrogram d;
  d.leaf_count = leaves;
  for (const auto& [l, r, h, s] : merges) d.merges.push_back({l, r, h, s});
  return d;
}

graphkit::SimilarityGraph graph_of(std::size_t n, const std::vector<EdgeTuple>& edges) {
  graphkit::SimilarityGraph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({i, std::to_string(i)});
  for (const auto& [a, b, w] : edges) {
    if (a == b || a >= n || b >= n) throw ArgumentError("edge endpoints must be distinct node ids");
    g.edges.push_back({std::min(a, b), std::max(a, b), w});
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  return g;
}

// Runs an AtlasServer on a background thread for the lifetime of the object.
class BackgroundServer {
public:
  BackgroundServer(const std::string& corpus_path, const std::string& host, int port, int iterations) {
    server::ServerConfig cfg;
    cfg.corpus_path = corpus_path;
    cfg.host = host;
    cfg.port = port;
    cfg.atlas_options.layout_iterations = iterations;
    srv_ = std::make_unique<server::AtlasServer>(cfg);
    srv_->load();
    port_ = srv_->bind();
    thread_ = std::thread([this] { srv_->listen(); });
  }
  ~BackgroundServer() { stop(); }

  int port() const { return port_; }
  void stop() {
    if (!thread_.joinable()) return;
    srv_->stop();
    py::gil_scoped_release release;
    thread_.join();
  }

private:
  std::unique_ptr<server::AtlasServer> srv_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the constellation model-hub atlas";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<RowError>(m, "RowError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<UndefinedError>(m, "UndefinedError", PyExc_ValueError);
  py::register_exception<EmptySelectionError>(m, "EmptySelectionError", PyExc_ValueError);
  py::register_exception<ClusterCountError>(m, "ClusterCountError", PyExc_ValueError);
  py::register_exception<EmptyInputError>(m, "EmptyInputError", PyExc_ValueError);

  m.def("extract_params", [](const std::string& name) { return corpus::extract_params(name); }, py::arg("model_name"));

  m.def("parse_csv", [](const std::string& text) {
    py::list out;
    for (const auto& r : corpus::parse_csv(text).records) out.append(record_dict(r));
    return out;
  }, py::arg("text"));

  m.def("filter_csv", [](const std::string& text, std::uint64_t min_downloads) {
    return corpus::to_csv(corpus::filter_min_downloads(corpus::parse_csv(text), min_downloads));
  }, py::arg("text"), py::arg("min_downloads"));

  m.def("cosine_similarity", [](const std::vector<std::string>& names) {
    return rows_of(textfeat::cosine_similarity(textfeat::tfidf(names)));
  }, py::arg("names"));

  m.def("single_linkage", [](const Rows& dist) {
    std::vector<MergeTuple> out;
    for (const auto& mg : cluster::single_linkage(matrix_of(dist)).merges) out.emplace_back(mg.left, mg.right, mg.height, mg.size);
    return out;
  }, py::arg("distances"), "Merges as (left, right, height, size); merge i creates node n + i.");

  m.def("cut", [](std::size_t leaves, const std::vector<MergeTuple>& merges, std::size_t k) {
    return cluster::cut(dendrogram_of(leaves, merges), k).labels;
  }, py::arg("leaves"), py::arg("merges"), py::arg("k"));

  m.def("to_newick", [](const std::vector<MergeTuple>& merges, const std::vector<std::string>& labels) {
    return cluster::to_newick(dendrogram_of(labels.size(), merges), labels);
  }, py::arg("merges"), py::arg("labels"));

  m.def("modularity", [](std::size_t n, const std::vector<EdgeTuple>& edges, const std::vector<std::size_t>& community) {
    return graphkit::modularity(graph_of(n, edges), {community});
  }, py::arg("n"), py::arg("edges"), py::arg("community"));

  m.def("louvain", [](std::size_t n, const std::vector<EdgeTuple>& edges, std::uint64_t seed) {
    return graphkit::louvain(graph_of(n, edges), seed).community;
  }, py::arg("n"), py::arg("edges"), py::arg("seed") = atlas::kDefaultSeed);

  m.def("layout_fr", [](std::size_t n, const std::vector<EdgeTuple>& edges, int iterations, std::uint64_t seed,
                        double width, double height, bool weighted) {
    graphkit::LayoutOptions o;
    o.iterations = iterations;
    o.seed = seed;
    o.width = width;
    o.height = height;
    o.weighted = weighted;
    std::vector<std::pair<double, double>> out;
    for (const auto& p : graphkit::layout_fr(graph_of(n, edges), o).positions) out.emplace_back(p.x, p.y);
    return out;
  }, py::arg("n"), py::arg("edges"), py::arg("iterations") = atlas::kDefaultIterations,
     py::arg("seed") = atlas::kDefaultSeed, py::arg("width") = 1.0, py::arg("height") = 1.0, py::arg("weighted") = true);

  m.def("pearson", [](const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys) {
    return analytics::pearson(xs, ys);
  }, py::arg("xs"), py::arg("ys"));

  m.def("word_frequencies", [](const std::vector<std::string>& names) {
    return analytics::word_frequencies(names).entries;
  }, py::arg("names"));

  m.def("atlas_bundle", [](const std::string& csv_text, std::uint64_t min_downloads, std::size_t k, double threshold,
                           std::uint64_t seed, int iterations) {
    atlas::AtlasQuery q{min_downloads, k, threshold, seed};
    atlas::validate(q);
    atlas::AtlasOptions opts;
    opts.layout_iterations = iterations;
    std::string out;
    {
      py::gil_scoped_release release;
      out = atlas::bundle_json(atlas::compute_atlas(corpus::parse_csv(csv_text), q, opts), q, "").dump();
    }
    return out;
  }, py::arg("csv_text"), py::arg("min_downloads") = atlas::kDefaultMinDownloads,
     py::arg("k") = atlas::kDefaultClusters, py::arg("threshold") = atlas::kDefaultThreshold,
     py::arg("seed") = atlas::kDefaultSeed, py::arg("iterations") = atlas::kDefaultIterations,
     "Full atlas bundle as JSON text.");

  py::class_<BackgroundServer>(m, "Server")
      .def(py::init<const std::string&, const std::string&, int, int>(), py::arg("corpus_path"),
           py::arg("host") = "127.0.0.1", py::arg("port") = 0, py::arg("iterations") = atlas::kDefaultIterations)
      .def_property_readonly("port", &BackgroundServer::port)
      .def("stop", &BackgroundServer::stop)
      .def("__enter__", [](BackgroundServer& s) -> BackgroundServer& { return s; }, py::return_value_policy::reference)
      .def("__exit__", [](BackgroundServer& s, py::args) { s.stop(); });
}
