#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace constellation {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// CSV header missing or misnamed.
class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& column)
      : Error("schema error: expected column '" + column + "'"), column_(column) {}
  SchemaError(const std::string& column, const std::string& what)
      : Error("schema error: " + what), column_(column) {}
  const std::string& column() const noexcept { return column_; }

private:
  std::string column_;
};

// A malformed data row. Row numbers count data rows from 1 (header excluded).
class RowError : public Error {
public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

class EmptyInputError : public Error {
public:
  using Error::Error;
};

// Statistic or objective that is not defined for the given input
// (constant series, edgeless graph).
class UndefinedError : public Error {
public:
  using Error::Error;
};

class FetchError : public Error {
public:
  FetchError(std::size_t page, const std::string& what)
      : Error("fetch failed on page " + std::to_string(page) + ": " + what), page_(page) {}
  std::size_t page() const noexcept { return page_; }

private:
  std::size_t page_;
};

class ParseError : public Error {
public:
  using Error::Error;
};

// The download filter left no models to analyse.
class EmptySelectionError : public Error {
public:
  using Error::Error;
};

// Requested cluster count exceeds the number of models selected.
class ClusterCountError : public Error {
public:
  using Error::Error;
};

}  // namespace constellation
