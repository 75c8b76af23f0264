#include "doctest.h"

#include <future>
#include <random>
#include <set>

#include "constellation/cluster.hpp"
#include "constellation/error.hpp"
#include "support/oracles.hpp"

using namespace constellation;
using namespace constellation::cluster;
using textfeat::DistanceMatrix;

namespace {

DistanceMatrix to_matrix(const oracle::Matrix& m) {
  DistanceMatrix d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) d(i, j) = m[i][j];
  }
  return d;
}

std::vector<std::size_t> members(const Dendrogram& d, std::size_t node) {
  if (d.is_leaf(node)) return {node};
  const auto& m = d.merges[node - d.leaf_count];
  auto a = members(d, m.left);
  auto b = members(d, m.right);
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

// Single-linkage distance between every pair of leaves is the height of
// their lowest common ancestor; cophenetic distances are an ultrametric.
double cophenetic(const Dendrogram& d, std::size_t i, std::size_t j) {
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    auto mem = members(d, d.leaf_count + m);
    if (std::binary_search(mem.begin(), mem.end(), i) && std::binary_search(mem.begin(), mem.end(), j)) {
      return d.merges[m].height;
    }
  }
  return 0.0;
}

}  // namespace

TEST_CASE("single_linkage on a four-point example") {
  oracle::Matrix m{{0, .1, .5, .9}, {.1, 0, .4, .8}, {.5, .4, 0, .3}, {.9, .8, .3, 0}};
  const auto d = single_linkage(to_matrix(m));
  REQUIRE(d.merges.size() == 3);
  CHECK(d.merges[0] == Merge{0, 1, .1, 2});
  CHECK(d.merges[1] == Merge{2, 3, .3, 2});
  CHECK(d.merges[2] == Merge{4, 5, .4, 4});
  CHECK(to_newick(d, {"a", "b", "c", "d"}) == "((a:0.1,b:0.1):0.30000000000000004,(c:0.3,d:0.3):0.10000000000000003);");
}

TEST_CASE("single_linkage matches naive agglomeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 14;
    const auto m = oracle::random_distinct_distances(n, rng);
    const auto d = single_linkage(to_matrix(m));
    const auto naive = oracle::naive_single_linkage(m);
    REQUIRE(d.merges.size() == naive.size());
    for (std::size_t k = 0; k < naive.size(); ++k) {
      CHECK(d.merges[k].height == naive[k].height);
      CHECK(members(d, d.merges[k].left) == naive[k].left_members);
      CHECK(members(d, d.merges[k].right) == naive[k].right_members);
    }
    std::vector<double> heights;
    for (const auto& mg : d.merges) heights.push_back(mg.height);
    CHECK(heights == oracle::mst_weights(m));
  }
}

TEST_CASE("single_linkage with ties follows the smallest leaf pair") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = static_cast<double>(rng() % 4) / 4.0;
    }
    const auto d = single_linkage(to_matrix(m));
    const auto naive = oracle::naive_single_linkage(m);
    for (std::size_t k = 0; k < naive.size(); ++k) {
      CHECK(d.merges[k].height == naive[k].height);
      CHECK(members(d, d.merges[k].left) == naive[k].left_members);
      CHECK(members(d, d.merges[k].right) == naive[k].right_members);
    }
  }
}

TEST_CASE("dendrogram invariants") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto m = oracle::random_distinct_distances(n, rng);
    const auto d = single_linkage(to_matrix(m));
    CHECK(d.merges.size() == n - 1);
    for (std::size_t k = 1; k < d.merges.size(); ++k) CHECK(d.merges[k - 1].height <= d.merges[k].height);
    std::set<std::size_t> used;
    for (std::size_t k = 0; k < d.merges.size(); ++k) {
      const auto& mg = d.merges[k];
      CHECK(mg.left < n + k);
      CHECK(mg.right < n + k);
      CHECK(used.insert(mg.left).second);
      CHECK(used.insert(mg.right).second);
      CHECK(mg.size == members(d, n + k).size());
    }
    if (n > 1) CHECK(d.merges.back().size == n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          CHECK(cophenetic(d, a, c) <= std::max(cophenetic(d, a, b), cophenetic(d, b, c)));
        }
      }
    }
  }
}

TEST_CASE("single_linkage input validation") {
  CHECK_THROWS_AS(single_linkage(DistanceMatrix(0)), EmptyInputError);
  const auto one = single_linkage(DistanceMatrix(1));
  CHECK(one.merges.empty());
  CHECK(to_newick(one, {"gpt2"}) == "gpt2;");

  DistanceMatrix bad(2);
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_THROWS_AS(single_linkage(bad), ArgumentError);
  DistanceMatrix asym(2);
  asym(0, 1) = 0.2;
  asym(1, 0) = 0.3;
  CHECK_THROWS_AS(single_linkage(asym), ArgumentError);
  DistanceMatrix nan(2);
  nan(0, 1) = nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(single_linkage(nan), ArgumentError);
}

TEST_CASE("cut") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    const auto m = oracle::random_distinct_distances(n, rng);
    const auto d = single_linkage(to_matrix(m));

    SUBCASE("k clusters with labels ordered by smallest leaf") {
      for (std::size_t k = 1; k <= n; ++k) {
        const auto f = cut(d, k);
        CHECK(f.k == k);
        std::set<std::size_t> labels(f.labels.begin(), f.labels.end());
        CHECK(labels.size() == k);
        std::size_t next = 0;
        for (auto l : f.labels) {
          CHECK(l <= next);
          if (l == next) ++next;
        }
        const auto sizes = cluster_sizes(f);
        CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == n);
      }
    }
    SUBCASE("extremes") {
      const auto all = cut(d, 1);
      CHECK(std::all_of(all.labels.begin(), all.labels.end(), [](auto l) { return l == 0; }));
      const auto each = cut(d, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(each.labels[i] == i);
    }
    SUBCASE("cuts are nested") {
      for (std::size_t k = 2; k <= n; ++k) {
        const auto fine = cut(d, k);
        const auto coarse = cut(d, k - 1);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (fine.labels[i] == fine.labels[j]) CHECK(coarse.labels[i] == coarse.labels[j]);
          }
        }
      }
    }
    SUBCASE("bad k") {
      CHECK_THROWS_AS(cut(d, 0), ArgumentError);
      CHECK_THROWS_AS(cut(d, n + 1), ArgumentError);
    }
  }
}

TEST_CASE("newick labels") {
  CHECK(newick_label("gpt2") == "gpt2");
  CHECK(newick_label("vicuna-7b-v1.1") == "vicuna-7b-v1.1");
  CHECK(newick_label("a b") == "'a b'");
  CHECK(newick_label("x(1)") == "'x(1)'");
  CHECK(newick_label("it's") == "'it''s'");
  CHECK(newick_label("a:b;c,d") == "'a:b;c,d'");
}

TEST_CASE("newick for a deep chain does not recurse") {
  const std::size_t n = 20000;
  Dendrogram d;
  d.leaf_count = n;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    d.merges.push_back({k == 0 ? 0 : n + k - 1, k + 1, static_cast<double>(k + 1) / static_cast<double>(n), k + 2});
  }
  std::vector<std::string> labels(n, "x");
  const auto text = to_newick(d, labels);
  CHECK(std::count(text.begin(), text.end(), '(') == static_cast<long>(n - 1));
  CHECK(text.back() == ';');
}

TEST_CASE("nested json") {
  oracle::Matrix m{{0, .1, .5}, {.1, 0, .4}, {.5, .4, 0}};
  const auto d = single_linkage(to_matrix(m));
  const std::vector<std::string> labels{"falcon-7b", "falcon 40b", "gpt2"};

  corpus::Corpus records;
  records.records.resize(3);
  records.records[0].downloads = 10;
  records.records[0].params_millions = 7000.0;
  records.records[1].likes = 3;

  const auto tree = to_nested_json(d, labels, records);
  CHECK(tree["height"] == .4);
  REQUIRE(tree["children"].size() == 2);
  const auto& pair = tree["children"][0];
  CHECK(pair["height"] == .1);
  CHECK(pair["children"][0]["name"] == "falcon-7b");
  CHECK(pair["children"][0]["meta"]["downloads"] == 10);
  CHECK(pair["children"][0]["meta"]["likes"].is_null());
  CHECK(pair["children"][0]["meta"]["params_millions"] == 7000.0);
  CHECK(pair["children"][1]["meta"]["likes"] == 3);
  CHECK(tree["children"][1]["name"] == "gpt2");
  CHECK(tree["children"][1]["height"] == 0.0);

  CHECK(newick_from_nested_json(tree) == to_newick(d, labels));
  CHECK_FALSE(to_nested_json(d, labels, {})["children"][1].contains("meta"));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const auto dd = single_linkage(to_matrix(oracle::random_distinct_distances(n, rng)));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("m " + std::to_string(i));
    const auto j = to_nested_json(dd, names, {});
    CHECK(newick_from_nested_json(nlohmann::json::parse(j.dump())) == to_newick(dd, names));
  }
}

TEST_CASE("nested json for a hub-sized chain survives a worker-thread stack") {
  // Worst case for a full hub snapshot: a single chain of ~16k merges.
  const std::size_t n = 20000;
  Dendrogram d;
  d.leaf_count = n;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    d.merges.push_back({k == 0 ? 0 : n + k - 1, k + 1, static_cast<double>(k + 1) / static_cast<double>(n), k + 2});
  }
  const std::vector<std::string> labels(n, "m");
  const bool same = std::async(std::launch::async, [&] {
                      const auto text = to_nested_json(d, labels, {}).dump();
                      return newick_from_nested_json(nlohmann::json::parse(text)) == to_newick(d, labels);
                    }).get();
  CHECK(same);
}
