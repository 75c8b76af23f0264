#include "constellation/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "constellation/error.hpp"
#include "constellation/textfeat.hpp"

namespace constellation::analytics {

using nlohmann::json;

std::size_t WordFrequencyTable::total() const {
  std::size_t sum = 0;
  for (const auto& [_, count] : entries) sum += count;
  return sum;
}

std::vector<std::string> word_tokens(std::string_view name) {
  std::vector<std::string> words;
  std::string current;
  for (char raw : name) {
    char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current += c;
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

namespace {

void count_into(WordFrequencyTable& table, std::string_view name, Granularity granularity) {
  if (granularity == Granularity::words) {
    for (auto& w : word_tokens(name)) ++table.entries[std::move(w)];
    return;
  }
  for (const auto& [gram, count] : textfeat::extract_ngrams(name)) {
    table.entries[gram] += static_cast<std::size_t>(count);
  }
}

}  // namespace

WordFrequencyTable word_frequencies(const std::vector<std::string>& names, Granularity granularity) {
  WordFrequencyTable table;
  for (const auto& name : names) count_into(table, name, granularity);
  return table;
}

std::vector<std::pair<std::string, std::size_t>> ranked(const WordFrequencyTable& table) {
  std::vector<std::pair<std::string, std::size_t>> out(table.entries.begin(), table.entries.end());
  // entries are already word-ascending, so a stable sort on count suffices.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

WordFrequencyTable truncate(const WordFrequencyTable& table, std::size_t top_n) {
  WordFrequencyTable out;
  out.scope = table.scope;
  auto order = ranked(table);
  if (order.size() > top_n) order.resize(top_n);
  out.entries.insert(order.begin(), order.end());
  return out;
}

std::vector<WordFrequencyTable> cluster_word_tables(const corpus::Corpus& corpus,
                                                    const cluster::FlatClustering& flat,
                                                    std::size_t top_n, Granularity granularity) {
  if (flat.labels.size() != corpus.size()) throw ArgumentError("clustering does not cover the corpus");
  std::vector<WordFrequencyTable> tables(flat.k);
  for (std::size_t c = 0; c < flat.k; ++c) tables[c].scope = std::to_string(c);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    count_into(tables.at(flat.labels[i]), corpus.records[i].model_name, granularity);
  }
  for (auto& t : tables) t = truncate(t, top_n);
  return tables;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ArgumentError("pearson needs series of equal length");
  const std::size_t n = xs.size();
  if (n < 2) throw UndefinedError("pearson needs at least two pairs");
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw UndefinedError("pearson is undefined for a constant series");

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("pearson is undefined for a constant series");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double pearson(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys) {
  if (xs.size() != ys.size()) throw ArgumentError("pearson needs series of equal length");
  std::vector<double> px;
  std::vector<double> py;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] && ys[i]) {
      px.push_back(*xs[i]);
      py.push_back(*ys[i]);
    }
  }
  return pearson(px, py);
}

std::vector<ScatterPoint> scatter_points(const corpus::Corpus& corpus) {
  std::vector<ScatterPoint> points;
  for (const auto& rec : corpus.records) {
    if (!rec.downloads || !rec.likes || *rec.downloads <= 0 || *rec.likes <= 0) continue;
    points.push_back({std::log10(static_cast<double>(*rec.downloads)),
                      std::log10(static_cast<double>(*rec.likes)), rec.model_name});
  }
  return points;
}

SummaryStats summary_stats(const corpus::Corpus& corpus, std::size_t top) {
  SummaryStats stats;
  stats.model_count = corpus.size();
  std::vector<std::optional<double>> downloads;
  std::vector<std::optional<double>> likes;
  for (const auto& rec : corpus.records) {
    if (rec.params_millions) ++stats.params_inferred_count;
    downloads.push_back(rec.downloads ? std::optional<double>(static_cast<double>(*rec.downloads)) : std::nullopt);
    likes.push_back(rec.likes ? std::optional<double>(static_cast<double>(*rec.likes)) : std::nullopt);
  }
  if (stats.model_count > 0) {
    stats.params_inferred_fraction =
        static_cast<double>(stats.params_inferred_count) / static_cast<double>(stats.model_count);
  }
  try {
    stats.likes_downloads_pearson = pearson(downloads, likes);
  } catch (const UndefinedError&) {
    stats.likes_downloads_pearson.reset();
  }

  std::vector<const corpus::ModelRecord*> with_downloads;
  for (const auto& rec : corpus.records) {
    if (rec.downloads) with_downloads.push_back(&rec);
  }
  std::stable_sort(with_downloads.begin(), with_downloads.end(),
                   [](const auto* a, const auto* b) { return *a->downloads > *b->downloads; });
  if (with_downloads.size() > top) with_downloads.resize(top);
  for (const auto* rec : with_downloads) stats.top_models.emplace_back(rec->model_name, *rec->downloads);
  return stats;
}

json to_json(const WordFrequencyTable& table) {
  json entries = json::array();
  for (const auto& [word, count] : ranked(table)) entries.push_back({{"word", word}, {"count", count}});
  return {{"scope", table.scope}, {"entries", std::move(entries)}};
}

json to_json(const std::vector<WordFrequencyTable>& tables) {
  json out = json::array();
  for (const auto& t : tables) out.push_back(to_json(t));
  return out;
}

json to_json(const SummaryStats& stats) {
  json top = json::array();
  for (const auto& [name, downloads] : stats.top_models) top.push_back({{"name", name}, {"downloads", downloads}});
  return {{"model_count", stats.model_count},
          {"params_inferred_count", stats.params_inferred_count},
          {"params_inferred_fraction", stats.params_inferred_fraction},
          {"likes_downloads_pearson",
           stats.likes_downloads_pearson ? json(*stats.likes_downloads_pearson) : json(nullptr)},
          {"top_models", std::move(top)}};
}

json to_json(const std::vector<ScatterPoint>& points) {
  json out = json::array();
  for (const auto& p : points) {
    out.push_back({{"name", p.name}, {"log10_downloads", p.log_downloads}, {"log10_likes", p.log_likes}});
  }
  return out;
}

}  // namespace constellation::analytics
