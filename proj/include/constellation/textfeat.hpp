#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace constellation::textfeat {

inline constexpr int kNgramMin = 2;
inline constexpr int kNgramMax = 8;

/// Character n-gram counts keyed by n-gram, ordered lexicographically.
using NgramCounts = std::map<std::string, int>;

/// Lowercases `name` (ASCII letters only) and emits every contiguous
/// substring of `n_min..n_max` characters. A character is one well-formed
/// UTF-8 sequence; stray bytes count as one character each. N-grams cross
/// punctuation and word boundaries; there is no padding.
NgramCounts extract_ngrams(std::string_view name, int n_min = kNgramMin, int n_max = kNgramMax);

struct NgramVocabulary {
  std::vector<std::string> terms;  // byte-lexicographic
  std::unordered_map<std::string, std::size_t> index;
  int n_min = kNgramMin;
  int n_max = kNgramMax;

  std::size_t size() const noexcept { return terms.size(); }
};

NgramVocabulary build_vocabulary(const std::vector<std::string>& names, int n_min = kNgramMin,
                                 int n_max = kNgramMax);

/// Sparse document x term matrix in CSR layout. Column indices within a row
/// are strictly increasing.
struct TfidfMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1 entries
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  NgramVocabulary vocabulary;

  double at(std::size_t row, std::size_t col) const;
  bool row_empty(std::size_t row) const { return row_ptr[row] == row_ptr[row + 1]; }
};

/// Smoothed TF-IDF over character n-grams:
///   tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalised.
/// Names shorter than `n_min` characters yield an all-zero row.
TfidfMatrix tfidf(const std::vector<std::string>& names, int n_min = kNgramMin,
                  int n_max = kNgramMax);

/// Dense row-major n x n matrix of reals.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const SquareMatrix&) const = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

using SimilarityMatrix = SquareMatrix;
using DistanceMatrix = SquareMatrix;

/// Pairwise cosine similarity of unit rows. Zero rows have similarity 0 to
/// everything, themselves included. Entries are clamped to [0, 1].
SimilarityMatrix cosine_similarity(const TfidfMatrix& m);

/// 1 - similarity, clamped to [0, 1]; the diagonal is 0 for non-zero rows.
/// A zero row keeps distance 1 to itself.
DistanceMatrix cosine_distance(const SimilarityMatrix& s);

/// `doc,term,weight` triples (term as its n-gram text), one per stored entry.
std::string dump_triples(const TfidfMatrix& m);

}  // namespace constellation::textfeat
