#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace mmerge {

/// Exact sample weight. Corpus scaling produces non-integer weights, and all
/// count arithmetic (merging, chunking, consolidation) stays exact.
using Count = boost::rational<std::int64_t>;

/// Accepts "7", "5/2" and finite decimals such as "2.5".
/// Throws std::invalid_argument on anything else.
Count parse_count(std::string_view text);

/// Integers print bare ("3"), everything else as "p/q".
std::string format_count(const Count& c);

inline double to_double(const Count& c) {
  return static_cast<double>(c.numerator()) / static_cast<double>(c.denominator());
}

/// Base class for all data and model errors (CLI exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// An operator or query that is invalid for the model it was applied to.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Invalid search or induction configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmerge
