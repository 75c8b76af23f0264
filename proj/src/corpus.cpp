#include "constellation/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <regex>
#include <unordered_set>

#include "constellation/error.hpp"
#include "numfmt.hpp"

namespace constellation::corpus {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "rank", "model_name", "link", "downloads", "likes", "ReadMeLink", "params_millions"};

// RFC-4180 reader. Returns rows of fields; tolerates CRLF and a trailing
// newline. Quoted fields may span lines.
std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

bool is_absent(std::string_view s) { return s.empty() || s == "NaN" || s == "nan"; }

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Integers may arrive in float form; the fractional part is truncated.
std::optional<std::int64_t> parse_count(std::string_view s) {
  std::int64_t iv = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), iv);
  if (ec == std::errc{} && ptr == s.data() + s.size()) return iv;
  auto dv = parse_double(s);
  if (!dv || !std::isfinite(*dv) || std::fabs(*dv) >= 9.2e18) return std::nullopt;
  return static_cast<std::int64_t>(std::trunc(*dv));
}

std::optional<std::int64_t> count_field(std::string_view s, std::size_t row, const char* column) {
  if (is_absent(s)) return std::nullopt;
  auto v = parse_count(s);
  if (!v) throw RowError(row, std::string("non-numeric value in ") + column + ": '" + std::string(s) + "'");
  if (*v < 0) throw RowError(row, std::string("negative value in ") + column);
  return v;
}

void write_field(std::string& out, std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += value;
    return;
  }
  out += '"';
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

Corpus parse_csv(std::string_view bytes) {
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  auto rows = split_csv(bytes);
  if (rows.empty()) throw SchemaError(std::string(kColumns[0]));

  const auto& header = rows.front();
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (c >= header.size() || header[c] != kColumns[c]) throw SchemaError(std::string(kColumns[c]));
  }
  if (header.size() > kColumns.size()) {
    throw SchemaError(header[kColumns.size()], "unexpected column '" + header[kColumns.size()] + "'");
  }

  Corpus corpus;
  std::unordered_set<std::string> links;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const std::size_t row_no = r;
    if (f.size() == 1 && f[0].empty()) continue;  // blank line
    if (f.size() != kColumns.size()) {
      throw RowError(row_no, "expected " + std::to_string(kColumns.size()) + " fields, got " +
                                 std::to_string(f.size()));
    }
    ModelRecord rec;
    auto rank = parse_count(f[0]);
    if (!rank || *rank < 1) throw RowError(row_no, "rank must be a positive integer: '" + f[0] + "'");
    rec.rank = *rank;
    if (f[1].empty()) throw RowError(row_no, "empty model_name");
    rec.model_name = f[1];
    rec.link = f[2];
    rec.downloads = count_field(f[3], row_no, "downloads");
    rec.likes = count_field(f[4], row_no, "likes");
    rec.readme_link = f[5].empty() ? derive_readme_link(rec.link) : f[5];
    if (!is_absent(f[6])) {
      auto p = parse_double(f[6]);
      if (!p) throw RowError(row_no, "non-numeric value in params_millions: '" + f[6] + "'");
      if (!std::isfinite(*p) || *p <= 0) throw RowError(row_no, "params_millions must be positive");
      rec.params_millions = *p;
    }
    if (!links.insert(rec.link).second) throw RowError(row_no, "duplicate link '" + rec.link + "'");
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

std::string to_csv(const Corpus& corpus) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& rec : corpus.records) {
    out += std::to_string(rec.rank);
    out += ',';
    write_field(out, rec.model_name);
    out += ',';
    write_field(out, rec.link);
    out += ',';
    out += rec.downloads ? detail::format_count(*rec.downloads) : "NaN";
    out += ',';
    out += rec.likes ? detail::format_count(*rec.likes) : "NaN";
    out += ',';
    write_field(out, rec.readme_link);
    out += ',';
    out += rec.params_millions ? detail::format_real(*rec.params_millions) : "NaN";
    out += '\n';
  }
  return out;
}

std::optional<double> extract_params(std::string_view model_name) {
  static const std::regex pattern(R"((\d+(\.\d+)?)(B|M|b|m))");
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_search(model_name.begin(), model_name.end(), match, pattern)) return std::nullopt;

  auto digits = match[1].str();
  auto value = parse_double(digits);
  if (!value) return std::nullopt;
  char unit = *match[3].first;
  double millions = (unit == 'B' || unit == 'b') ? *value * 1000.0 : *value;
  // "0b" and overflowing digit runs are not sizes.
  if (!std::isfinite(millions) || millions <= 0) return std::nullopt;
  return millions;
}

std::string derive_readme_link(std::string_view link) {
  while (link.size() > 1 && link.back() == '/') link.remove_suffix(1);
  std::string out(link);
  out += kReadmeSuffix;
  return out;
}

Corpus filter_min_downloads(const Corpus& corpus, std::uint64_t threshold) {
  Corpus out;
  out.snapshot_label = corpus.snapshot_label;
  for (const auto& rec : corpus.records) {
    if (rec.downloads && static_cast<std::uint64_t>(*rec.downloads) >= threshold) {
      out.records.push_back(rec);
    }
  }
  std::int64_t rank = 1;
  for (auto& rec : out.records) rec.rank = rank++;
  return out;
}

Corpus assign_ranks(Corpus corpus) {
  std::stable_sort(corpus.records.begin(), corpus.records.end(),
                   [](const ModelRecord& a, const ModelRecord& b) {
                     if (!b.downloads) return a.downloads.has_value();
                     if (!a.downloads) return false;
                     return *a.downloads > *b.downloads;
                   });
  std::int64_t rank = 1;
  for (auto& rec : corpus.records) rec.rank = rank++;
  return corpus;
}

std::vector<std::string> model_names(const Corpus& corpus) {
  std::vector<std::string> names;
  names.reserve(corpus.size());
  for (const auto& rec : corpus.records) names.push_back(rec.model_name);
  return names;
}

std::string final_segment(std::string_view id) {
  while (!id.empty() && id.back() == '/') id.remove_suffix(1);
  auto pos = id.rfind('/');
  return std::string(pos == std::string_view::npos ? id : id.substr(pos + 1));
}

}  // namespace constellation::corpus
