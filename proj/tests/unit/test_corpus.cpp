#include "doctest.h"

#include <random>
#include <set>

#include "constellation/corpus.hpp"
#include "constellation/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace constellation;
using namespace constellation::corpus;

TEST_CASE("parse_csv reads the published sample rows") {
  const Corpus c = parse_csv(fixtures::kFig1Csv);
  REQUIRE(c.size() == 5);

  const auto& gpt2 = c.records[0];
  CHECK(gpt2.rank == 1);
  CHECK(gpt2.model_name == "gpt2");
  CHECK(gpt2.downloads == 13600000);
  CHECK(gpt2.likes == 1260);
  CHECK_FALSE(gpt2.params_millions.has_value());
  CHECK(gpt2.readme_link == "https://huggingface.co/gpt2/raw/main/README.md");

  const auto& mpt = c.records[1];
  CHECK(mpt.downloads == 3050000);
  CHECK(mpt.likes == 418);
  REQUIRE(mpt.params_millions.has_value());
  CHECK(*mpt.params_millions == 7000.0);
}

TEST_CASE("parse_csv edge cases") {
  SUBCASE("header only") {
    CHECK(parse_csv(std::string(kCsvHeader) + "\n").empty());
    CHECK(parse_csv(kCsvHeader).empty());
  }
  SUBCASE("BOM and CRLF") {
    std::string text = "\xEF\xBB\xBF" + std::string(kCsvHeader) + "\r\n1,a,l,5,,x,NaN\r\n";
    auto c = parse_csv(text);
    REQUIRE(c.size() == 1);
    CHECK_FALSE(c.records[0].likes.has_value());
  }
  SUBCASE("quoted fields") {
    auto c = parse_csv(std::string(kCsvHeader) + "\n1,\"odd, \"\"name\"\"\",l,5,1,x,NaN\n");
    CHECK(c.records[0].model_name == "odd, \"name\"");
  }
  SUBCASE("misnamed column names the expected one") {
    try {
      parse_csv("rank,name,link,downloads,likes,ReadMeLink,params_millions\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "model_name");
    }
  }
  SUBCASE("missing column") {
    try {
      parse_csv("rank,model_name,link,downloads,likes,ReadMeLink\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "params_millions");
    }
  }
  SUBCASE("non-numeric value reports its row") {
    const std::string text = std::string(kCsvHeader) + "\n1,a,la,5,1,x,NaN\n2,b,lb,lots,1,x,NaN\n";
    try {
      parse_csv(text);
      FAIL("expected RowError");
    } catch (const RowError& e) {
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("empty model name") {
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,,l,5,1,x,NaN\n"), RowError);
  }
  SUBCASE("duplicate link") {
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,a,l,5,1,x,NaN\n2,b,l,4,1,x,NaN\n"), RowError);
  }
  SUBCASE("non-positive params") {
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,a,l,5,1,x,0\n"), RowError);
  }
  SUBCASE("empty ReadMeLink is derived") {
    auto c = parse_csv(std::string(kCsvHeader) + "\n1,a,https://h.co/a,5,1,,NaN\n");
    CHECK(c.records[0].readme_link == "https://h.co/a/raw/main/README.md");
  }
}

TEST_CASE("extract_params") {
  CHECK(extract_params("falcon-7b") == 7000.0);
  CHECK_FALSE(extract_params("gpt2").has_value());
  CHECK(extract_params("bloom-560m") == 560.0);
  CHECK(extract_params("llama-1.3b-chat") == 1300.0);
  CHECK(extract_params("quantized-8bit") == 8000.0);
  CHECK(extract_params("vicuna-7b-v1.1") == 7000.0);
  CHECK(extract_params("Model-13B") == 13000.0);
  CHECK(extract_params("x-125M") == 125.0);
  CHECK_FALSE(extract_params("").has_value());
  CHECK_FALSE(extract_params("no-size-here").has_value());
  // First match wins.
  CHECK(extract_params("opt-350m-to-13b") == 350.0);
  // A zero size is not a parameter count.
  CHECK_FALSE(extract_params("llama-0b").has_value());
}

TEST_CASE("extract_params reproduces the published params column") {
  const Corpus c = parse_csv(fixtures::kFig1Csv);
  for (const auto& rec : c.records) {
    CAPTURE(rec.model_name);
    CHECK(extract_params(rec.model_name) == rec.params_millions);
  }
}

TEST_CASE("extract_params agrees with a hand-written matcher on fuzzed names") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abmMbB0123456789.-_v";
  for (int i = 0; i < 200; ++i) {
    std::string name;
    const std::size_t len = 1 + rng() % 16;
    for (std::size_t k = 0; k < len; ++k) name += alphabet[rng() % alphabet.size()];
    CAPTURE(name);
    CHECK(extract_params(name) == oracle::params_by_hand(name));
    CHECK(extract_params(name) == extract_params(name));
  }
}

TEST_CASE("derive_readme_link") {
  CHECK(derive_readme_link("https://huggingface.co/gpt2") == "https://huggingface.co/gpt2/raw/main/README.md");
  CHECK(derive_readme_link("x") == "x/raw/main/README.md");
  CHECK(derive_readme_link("https://h.co/a/b/") == "https://h.co/a/b/raw/main/README.md");
}

TEST_CASE("filter_min_downloads") {
  const Corpus fig1 = parse_csv(fixtures::kFig1Csv);

  SUBCASE("published rows at two million") {
    auto kept = filter_min_downloads(fig1, 2000000);
    REQUIRE(kept.size() == 2);
    CHECK(kept.records[0].model_name == "gpt2");
    CHECK(kept.records[1].model_name == "mpt-7b-instruct");
    CHECK(kept.records[1].rank == 2);
  }
  SUBCASE("unreachable bound") { CHECK(filter_min_downloads(fig1, 1000000000000000000ULL).empty()); }
  SUBCASE("zero drops only absent downloads") {
    Corpus c = fig1;
    c.records[2].downloads.reset();
    auto kept = filter_min_downloads(c, 0);
    CHECK(kept.size() == 4);
    for (std::size_t i = 0; i < kept.size(); ++i) CHECK(kept.records[i].rank == static_cast<std::int64_t>(i + 1));
    CHECK(c.records[3].rank == 4);  // input untouched
  }
  SUBCASE("monotone in the threshold") {
    const Corpus fx = parse_csv(fixtures::read_file(fixtures::fixture_csv()));
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
      std::uint64_t a = rng() % 20000000, b = rng() % 20000000;
      if (a > b) std::swap(a, b);
      std::set<std::string> low, high;
      for (const auto& r : filter_min_downloads(fx, a).records) low.insert(r.link);
      for (const auto& r : filter_min_downloads(fx, b).records) high.insert(r.link);
      CHECK(std::includes(low.begin(), low.end(), high.begin(), high.end()));
    }
  }
}

TEST_CASE("assign_ranks") {
  SUBCASE("stable on ties") {
    Corpus c;
    for (auto [name, d] : {std::pair{"a", 5}, {"b", 9}, {"c", 9}}) {
      ModelRecord r;
      r.model_name = name;
      r.link = name;
      r.downloads = d;
      c.records.push_back(r);
    }
    auto ranked = assign_ranks(c);
    CHECK(ranked.records[0].model_name == "b");
    CHECK(ranked.records[1].model_name == "c");
    CHECK(ranked.records[2].model_name == "a");
    CHECK(ranked.records[2].rank == 3);
  }
  SUBCASE("single record") {
    Corpus c;
    c.records.push_back({});
    CHECK(assign_ranks(c).records[0].rank == 1);
  }
  SUBCASE("absent downloads go last") {
    Corpus c;
    ModelRecord none;
    none.link = "none";
    ModelRecord some;
    some.link = "some";
    some.downloads = 0;
    c.records = {none, some};
    auto ranked = assign_ranks(c);
    CHECK(ranked.records[0].link == "some");
  }
  SUBCASE("shuffled published rows regain their order") {
    const Corpus fig1 = parse_csv(fixtures::kFig1Csv);
    Corpus shuffled = fig1;
    std::mt19937_64 rng(11);
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
    for (auto& r : shuffled.records) r.rank = 99;
    CHECK(assign_ranks(shuffled).records == fig1.records);
  }
  SUBCASE("ranks are exactly 1..n") {
    const Corpus fx = parse_csv(fixtures::read_file(fixtures::fixture_csv()));
    auto ranked = assign_ranks(fx);
    std::set<std::int64_t> ranks;
    for (const auto& r : ranked.records) ranks.insert(r.rank);
    CHECK(ranks.size() == fx.size());
    CHECK(*ranks.begin() == 1);
    CHECK(*ranks.rbegin() == static_cast<std::int64_t>(fx.size()));
  }
}

TEST_CASE("csv round trip") {
  SUBCASE("published rows are reproduced byte for byte") {
    CHECK(to_csv(parse_csv(fixtures::kFig1Csv)) == fixtures::kFig1Csv);
  }
  SUBCASE("bundled fixture is reproduced byte for byte") {
    const std::string text = fixtures::read_file(fixtures::fixture_csv());
    CHECK(to_csv(parse_csv(text)) == text);
  }
  SUBCASE("random records survive serialisation") {
    std::mt19937_64 rng(5);
    const std::string chars = "ab,\"\n -_.7BmX";
    Corpus c;
    for (int i = 0; i < 100; ++i) {
      ModelRecord r;
      r.rank = i + 1;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 10); ++k) r.model_name += chars[rng() % chars.size()];
      r.link = "https://h.co/" + std::to_string(i);
      if (rng() % 4) r.downloads = static_cast<std::int64_t>(rng() % 100000000);
      if (rng() % 4) r.likes = static_cast<std::int64_t>(rng() % 10000);
      r.readme_link = derive_readme_link(r.link);
      if (rng() % 2) r.params_millions = static_cast<double>(rng() % 100000) / 7.0 + 0.5;
      c.records.push_back(r);
    }
    CHECK(parse_csv(to_csv(c)).records == c.records);
  }
}

TEST_CASE("final_segment") {
  CHECK(final_segment("mosaicml/mpt-7b-instruct") == "mpt-7b-instruct");
  CHECK(final_segment("gpt2") == "gpt2");
  CHECK(final_segment("https://huggingface.co/a/b/") == "b");
}
