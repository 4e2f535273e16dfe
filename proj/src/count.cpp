#include "mmerge/count.hpp"

#include <charconv>
#include <limits>

namespace mmerge {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t value = 0;
  if (s.empty()) throw std::invalid_argument("malformed count '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("malformed count '" + std::string(whole) + "'");
  return value;
}

std::string line_prefix(int line, int column) {
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ": ";
}

}  // namespace

Count parse_count(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_int(text.substr(0, slash), text);
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in count '" + std::string(text) + "'");
    return Count(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    if (frac_part.empty() || frac_part.size() > 15 || frac_part.front() == '-' || frac_part.front() == '+')
      throw std::invalid_argument("malformed count '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (negative) int_part.remove_prefix(1);
    std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
    std::int64_t frac = parse_int(frac_part, text);
    if (whole > std::numeric_limits<std::int64_t>::max() / scale)
      throw std::invalid_argument("count out of range '" + std::string(text) + "'");
    Count c(whole * scale + frac, scale);
    if (negative) c = -c;
    return c;
  }
  return Count(parse_int(text, text));
}

std::string format_count(const Count& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  return std::to_string(c.numerator()) + "/" + std::to_string(c.denominator());
}

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(line > 0 ? line_prefix(line, column) + what : what), line_(line), column_(column) {}

}  // namespace mmerge
