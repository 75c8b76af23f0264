#include "constellation/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "constellation/error.hpp"
#include "numfmt.hpp"

namespace constellation::textfeat {

namespace {

// Byte offsets of character starts, plus a final end offset.
std::vector<std::size_t> char_boundaries(std::string_view s) {
  std::vector<std::size_t> cuts;
  cuts.reserve(s.size() + 1);
  std::size_t i = 0;
  while (i < s.size()) {
    cuts.push_back(i);
    auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xC2 && lead <= 0xDF) len = 2;
    else if (lead >= 0xE0 && lead <= 0xEF) len = 3;
    else if (lead >= 0xF0 && lead <= 0xF4) len = 4;
    if (len > 1) {
      bool ok = i + len <= s.size();
      for (std::size_t k = 1; ok && k < len; ++k) {
        ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
      }
      if (!ok) len = 1;
    }
    i += len;
  }
  cuts.push_back(s.size());
  return cuts;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

NgramCounts extract_ngrams(std::string_view name, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) throw ArgumentError("n-gram range requires 1 <= n_min <= n_max");
  const std::string lower = ascii_lower(name);
  const auto cuts = char_boundaries(lower);
  const std::size_t len = cuts.size() - 1;

  NgramCounts counts;
  const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(n_max), len);
  for (std::size_t n = static_cast<std::size_t>(n_min); n <= hi; ++n) {
    for (std::size_t start = 0; start + n <= len; ++start) {
      ++counts[lower.substr(cuts[start], cuts[start + n] - cuts[start])];
    }
  }
  return counts;
}

NgramVocabulary build_vocabulary(const std::vector<std::string>& names, int n_min, int n_max) {
  std::set<std::string> all;
  for (const auto& name : names) {
    for (auto& [term, _] : extract_ngrams(name, n_min, n_max)) all.insert(term);
  }
  NgramVocabulary vocab;
  vocab.n_min = n_min;
  vocab.n_max = n_max;
  vocab.terms.assign(all.begin(), all.end());
  vocab.index.reserve(vocab.terms.size());
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) vocab.index.emplace(vocab.terms[i], i);
  return vocab;
}

double TfidfMatrix::at(std::size_t row, std::size_t col) const {
  auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]);
  auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row + 1]);
  auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

TfidfMatrix tfidf(const std::vector<std::string>& names, int n_min, int n_max) {
  if (names.empty()) throw EmptyInputError("tfidf requires at least one name");

  std::vector<NgramCounts> docs;
  docs.reserve(names.size());
  for (const auto& name : names) docs.push_back(extract_ngrams(name, n_min, n_max));

  TfidfMatrix m;
  m.vocabulary = build_vocabulary(names, n_min, n_max);
  m.rows = names.size();
  m.cols = m.vocabulary.size();

  std::vector<std::size_t> df(m.cols, 0);
  for (const auto& doc : docs) {
    for (const auto& [term, _] : doc) ++df[m.vocabulary.index.at(term)];
  }
  const double n_docs = static_cast<double>(m.rows);
  std::vector<double> idf(m.cols);
  for (std::size_t t = 0; t < m.cols; ++t) {
    idf[t] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }

  m.row_ptr.reserve(m.rows + 1);
  m.row_ptr.push_back(0);
  for (const auto& doc : docs) {
    const std::size_t begin = m.values.size();
    double sq = 0.0;
    // NgramCounts iterates in byte order, matching the vocabulary order.
    for (const auto& [term, count] : doc) {
      const std::size_t col = m.vocabulary.index.at(term);
      const double w = static_cast<double>(count) * idf[col];
      m.col_idx.push_back(col);
      m.values.push_back(w);
      sq += w * w;
    }
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (std::size_t k = begin; k < m.values.size(); ++k) m.values[k] /= norm;
    }
    m.row_ptr.push_back(m.values.size());
  }
  return m;
}

SimilarityMatrix cosine_similarity(const TfidfMatrix& m) {
  const std::size_t n = m.rows;
  SimilarityMatrix sim(n, 0.0);

  // Posting lists: term -> (doc, weight), docs ascending.
  std::vector<std::vector<std::pair<std::size_t, double>>> postings(m.cols);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t k = m.row_ptr[d]; k < m.row_ptr[d + 1]; ++k) {
      postings[m.col_idx[k]].emplace_back(d, m.values[k]);
    }
  }

  std::vector<double> acc(n, 0.0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.row_empty(i)) continue;
    sim(i, i) = 1.0;
    // Accumulate over shared terms in increasing column order.
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const double wi = m.values[k];
      const auto& list = postings[m.col_idx[k]];
      auto it = std::upper_bound(list.begin(), list.end(), i,
                                 [](std::size_t v, const auto& p) { return v < p.first; });
      for (; it != list.end(); ++it) {
        if (acc[it->first] == 0.0) touched.push_back(it->first);
        acc[it->first] += wi * it->second;
      }
    }
    for (std::size_t j : touched) {
      const double s = std::clamp(acc[j], 0.0, 1.0);
      sim(i, j) = s;
      sim(j, i) = s;
      acc[j] = 0.0;
    }
    touched.clear();
  }
  return sim;
}

DistanceMatrix cosine_distance(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  DistanceMatrix d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::clamp(1.0 - s(i, j), 0.0, 1.0);
    if (s(i, i) > 0.0) d(i, i) = 0.0;
  }
  return d;
}

std::string dump_triples(const TfidfMatrix& m) {
  std::ostringstream out;
  out << "doc,term,weight\n";
  for (std::size_t d = 0; d < m.rows; ++d) {
    for (std::size_t k = m.row_ptr[d]; k < m.row_ptr[d + 1]; ++k) {
      const std::string& term = m.vocabulary.terms[m.col_idx[k]];
      out << d << ',';
      if (term.find_first_of(",\"\r\n") == std::string::npos) {
        out << term;
      } else {
        out << '"';
        for (char c : term) out << (c == '"' ? "\"\"" : std::string(1, c));
        out << '"';
      }
      out << ',' << detail::format_real(m.values[k]) << '\n';
    }
  }
  return out.str();
}

}  // namespace constellation::textfeat
