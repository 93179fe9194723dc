#ifndef KICKCAST_CSV_HPP
#define KICKCAST_CSV_HPP

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "kickcast/error.hpp"

namespace kickcast {

// Splits one CSV line. Double-quoted fields may contain commas and doubled
// quotes. Surrounding whitespace of unquoted fields is trimmed.
inline std::vector<std::string> split_csv_line(std::string_view line, const std::string& context) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  size_t i = 0;
  auto push = [&] {
    if (!quoted) {
      size_t b = cur.find_first_not_of(" \t\r");
      size_t e = cur.find_last_not_of(" \t\r");
      cur = (b == std::string::npos) ? std::string() : cur.substr(b, e - b + 1);
    }
    fields.push_back(cur);
    cur.clear();
    quoted = false;
  };
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      push();
    } else {
      cur += c;
    }
    ++i;
  }
  if (quoted) throw input_error(context + ": unterminated quoted field");
  push();
  return fields;
}

struct CsvRow {
  std::vector<std::string> fields;
  size_t line_no = 0;
};

// Header-aware CSV reader. Lines starting with '#' are comments.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, bool allow_empty = false)
      : in_(in), source_(std::move(source)) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (is_skippable(line)) continue;
      header_ = split_csv_line(line, where());
      return;
    }
    if (!allow_empty) throw input_error(source_ + ": empty file, no header row");
  }

  bool empty() const { return header_.empty(); }

  const std::vector<std::string>& header() const { return header_; }

  // Index of a mandatory column.
  size_t column(const std::string& name) const {
    for (size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    throw input_error(source_ + ": missing mandatory column '" + name + "'");
  }

  bool next(CsvRow& row) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (is_skippable(line)) continue;
      row.fields = split_csv_line(line, where());
      row.line_no = line_no_;
      if (row.fields.size() != header_.size())
        throw input_error(where() + ": expected " + std::to_string(header_.size()) +
                          " fields, got " + std::to_string(row.fields.size()));
      return true;
    }
    return false;
  }

  std::string where() const { return source_ + ":" + std::to_string(line_no_); }
  const std::string& source() const { return source_; }

 private:
  static bool is_skippable(const std::string& line) {
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r') continue;
      return c == '#';
    }
    return true;
  }

  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  size_t line_no_ = 0;
};

inline long parse_long(const std::string& s, const std::string& context) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw input_error(context + ": not an integer: '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, const std::string& context) {
  return static_cast<int>(parse_long(s, context));
}

inline double parse_double(const std::string& s, const std::string& context) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw input_error(context + ": not a number: '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& context) {
  if (s == "yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "false" || s == "0") return false;
  throw input_error(context + ": not a yes/no flag: '" + s + "'");
}

// Shortest decimal string that round-trips the exact double value.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw internal_error("to_chars failed");
  return std::string(buf, ptr);
}

}  // namespace kickcast

#endif
