#include "doctest.h"

#include <cmath>
#include <random>

#include "constellation/corpus.hpp"
#include "constellation/error.hpp"
#include "constellation/textfeat.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace constellation;
using namespace constellation::textfeat;

namespace {

std::vector<std::string> random_names(std::mt19937_64& rng, std::size_t count) {
  const std::string chars = "abcdeflmotx0123456789-._";
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s;
    const std::size_t len = rng() % 14;
    for (std::size_t k = 0; k < len; ++k) s += chars[rng() % chars.size()];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("extract_ngrams") {
  SUBCASE("gpt2 has six n-grams") {
    NgramCounts expected{{"gp", 1}, {"pt", 1}, {"t2", 1}, {"gpt", 1}, {"pt2", 1}, {"gpt2", 1}};
    CHECK(extract_ngrams("gpt2") == expected);
    CHECK(extract_ngrams("GPT2") == expected);
  }
  SUBCASE("repeats are counted") {
    auto c = extract_ngrams("aaaa");
    CHECK(c["aa"] == 3);
    CHECK(c["aaa"] == 2);
    CHECK(c["aaaa"] == 1);
  }
  SUBCASE("short names yield nothing") {
    CHECK(extract_ngrams("").empty());
    CHECK(extract_ngrams("x").empty());
  }
  SUBCASE("n-grams cross punctuation") { CHECK(extract_ngrams("a-b").count("a-b") == 1); }
  SUBCASE("longest n-gram is eight characters") {
    auto c = extract_ngrams("abcdefghij");
    CHECK(c.count("abcdefgh") == 1);
    CHECK(c.count("abcdefghi") == 0);
    // 9 + 8 + 7 + 6 + 5 + 4 + 3
    CHECK(c.size() == 42);
  }
  SUBCASE("a UTF-8 sequence is one character") {
    auto c = extract_ngrams("\xC3\xA9t\xC3\xA9");  // "été"
    CHECK(c.count("\xC3\xA9t") == 1);
    CHECK(c.count("t\xC3\xA9") == 1);
    CHECK(c.count("\xC3\xA9t\xC3\xA9") == 1);
    CHECK(c.size() == 3);
  }
  SUBCASE("bad bounds") {
    CHECK_THROWS_AS(extract_ngrams("abc", 0, 3), ArgumentError);
    CHECK_THROWS_AS(extract_ngrams("abc", 4, 3), ArgumentError);
  }
}

TEST_CASE("tfidf on a three-name hand example") {
  const auto m = tfidf({"abc", "abd", "xyz"});
  const double shared = std::log(4.0 / 3.0) + 1.0;
  const double unique = std::log(2.0) + 1.0;
  const double norm = std::sqrt(shared * shared + 2 * unique * unique);

  REQUIRE(m.rows == 3);
  CHECK(m.cols == 8);
  const auto ab = m.vocabulary.index.at("ab");
  const auto bc = m.vocabulary.index.at("bc");
  CHECK(m.at(0, ab) == doctest::Approx(shared / norm).epsilon(1e-12));
  CHECK(m.at(0, bc) == doctest::Approx(unique / norm).epsilon(1e-12));
  CHECK(m.at(2, ab) == 0.0);

  const auto s = cosine_similarity(m);
  CHECK(s(0, 1) == doctest::Approx(shared * shared / (norm * norm)).epsilon(1e-12));
  CHECK(s(0, 2) == 0.0);
  CHECK(s(1, 2) == 0.0);
  CHECK(s(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tfidf agrees with a dense oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto names = random_names(rng, 1 + rng() % 25);
    const auto m = tfidf(names);
    const auto dense = oracle::dense_tfidf(names, kNgramMin, kNgramMax);
    REQUIRE(m.cols == (dense.empty() ? 0 : dense[0].size()));
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.cols; ++j) CHECK(std::abs(m.at(i, j) - dense[i][j]) <= 1e-9);
    }
    const auto s = cosine_similarity(m);
    for (std::size_t i = 0; i < m.rows; ++i) {
      for (std::size_t j = 0; j < m.rows; ++j) {
        CHECK(std::abs(s(i, j) - std::clamp(oracle::dot(dense[i], dense[j]), 0.0, 1.0)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("tfidf invariants") {
  const auto c = corpus::parse_csv(fixtures::read_file(fixtures::fixture_csv()));
  const auto names = corpus::model_names(c);
  const auto m = tfidf(names);

  SUBCASE("csr columns strictly increase") {
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t p = m.row_ptr[r] + 1; p < m.row_ptr[r + 1]; ++p) CHECK(m.col_idx[p - 1] < m.col_idx[p]);
    }
  }
  SUBCASE("non-empty rows have unit norm") {
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (m.row_empty(r)) continue;
      double n2 = 0;
      for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) n2 += m.values[p] * m.values[p];
      CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-12);
    }
  }
  SUBCASE("similarity is symmetric with a unit diagonal and lies in [0, 1]") {
    const auto s = cosine_similarity(m);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(s(i, i) - 1.0) <= 1e-12);
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(s(i, j) == s(j, i));
        CHECK(s(i, j) >= 0.0);
        CHECK(s(i, j) <= 1.0);
      }
    }
  }
  SUBCASE("identical names have similarity one") {
    const auto s = cosine_similarity(tfidf({"llama-7b", "llama-7b", "opt"}));
    CHECK(std::abs(s(0, 1) - 1.0) <= 1e-12);
  }
  SUBCASE("permuting the input permutes the rows") {
    std::vector<std::string> sub(names.begin(), names.begin() + 30);
    std::vector<std::size_t> perm(sub.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(2);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> permuted;
    for (auto i : perm) permuted.push_back(sub[i]);
    const auto a = cosine_similarity(tfidf(sub));
    const auto b = cosine_similarity(tfidf(permuted));
    for (std::size_t i = 0; i < sub.size(); ++i) {
      for (std::size_t j = 0; j < sub.size(); ++j) CHECK(std::abs(b(i, j) - a(perm[i], perm[j])) <= 1e-12);
    }
  }
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(tfidf({}), EmptyInputError);

  const auto single = tfidf({"gpt2"});
  CHECK(single.rows == 1);
  CHECK(cosine_similarity(single)(0, 0) == doctest::Approx(1.0));

  const auto short_name = tfidf({"a", "gpt2"});
  CHECK(short_name.row_empty(0));
  const auto s = cosine_similarity(short_name);
  CHECK(s(0, 0) == 0.0);
  CHECK(s(0, 1) == 0.0);
  const auto d = cosine_distance(s);
  CHECK(d(0, 0) == 1.0);
  CHECK(d(1, 1) == 0.0);
  CHECK(d(0, 1) == 1.0);
}

TEST_CASE("cosine_distance") {
  const auto s = cosine_similarity(tfidf({"falcon-7b", "falcon-40b", "mpt-7b"}));
  const auto d = cosine_distance(s);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) CHECK(d(i, j) == doctest::Approx(1.0 - s(i, j)));
      CHECK(d(i, j) >= 0.0);
      CHECK(d(i, j) <= 1.0);
    }
  }
}

TEST_CASE("dump_triples") {
  const auto m = tfidf({"ab", "a,b"});
  const std::string dump = dump_triples(m);
  CHECK(dump.rfind("doc,term,weight\n", 0) == 0);
  CHECK(dump.find("0,ab,1.0\n") != std::string::npos);
  CHECK(dump.find("1,\"a,b\",") != std::string::npos);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 1 + static_cast<long>(m.values.size()));
}
