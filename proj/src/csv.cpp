#include "tcas/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "tcas/errors.hpp"

namespace tcas::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.emplace_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  out.emplace_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

bool Reader::next(std::vector<std::string>& fields) {
  while (std::getline(in_, buf_)) {
    ++line_;
    if (line_ == 1 && buf_.size() >= 3 &&
        buf_.compare(0, 3, "\xEF\xBB\xBF") == 0)
      buf_.erase(0, 3);
    if (trim(buf_).empty()) continue;
    fields = split(buf_);
    return true;
  }
  return false;
}

double parse_double(std::string_view field, std::size_t line,
                    std::string_view column) {
  std::string s(trim(field));
  if (s.empty())
    throw ValueError(line, "empty value in column '" + std::string(column) + "'");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ValueError(line, "non-numeric value '" + s + "' in column '" +
                               std::string(column) + "'");
  return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line,
                       std::string_view column) {
  std::string_view s = trim(field);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ValueError(line, "non-integer value '" + std::string(s) +
                               "' in column '" + std::string(column) + "'");
  return v;
}

std::string format(double x) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace tcas::csv
