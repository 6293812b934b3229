#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace tcas::csv {

/// Splits one comma-separated record. Double-quoted fields may contain commas
/// and doubled quotes; surrounding whitespace and a trailing '\r' are kept out.
std::vector<std::string> split(std::string_view line);

/// Line-oriented reader that tracks 1-based line numbers and skips blank lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::string buf_;
};

double parse_double(std::string_view field, std::size_t line,
                    std::string_view column);
std::int64_t parse_int(std::string_view field, std::size_t line,
                       std::string_view column);

/// 17 significant digits; parse_double(format(x)) == x bit for bit.
std::string format(double x);

}  // namespace tcas::csv
