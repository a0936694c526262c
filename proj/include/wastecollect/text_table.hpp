#pragma once

// Minimal comma-separated table and number helpers shared by the file
// readers and writers. Blank lines and lines starting with '#' are skipped.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "wastecollect/error.hpp"

namespace wastecollect::text {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::kParse, "cannot parse number '" + std::string(s) + "' for " + std::string(what));
  }
  return value;
}

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::kParse, "cannot parse integer '" + std::string(s) + "' for " + std::string(what));
  }
  return value;
}

// Shortest representation that round-trips; keeps written files
// byte-identical across runs.
inline std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  std::string out(buf, ptr);
  // "-0.0" reads badly in reports.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

template <typename Range>
std::string join(const Range& values, char delim) {
  std::string out;
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += delim;
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += format_double(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

// A parsed table: column lookup by header name, rows as string fields.
class Table {
 public:
  static Table parse(std::istream& in, std::string_view source) {
    Table t;
    t.source_ = std::string(source);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      auto fields = split(body, ',');
      if (!have_header) {
        t.header_ = std::move(fields);
        for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
        have_header = true;
        continue;
      }
      if (fields.size() != t.header_.size()) {
        throw Error(ErrorKind::kParse, t.source_ + ":" + std::to_string(line_no) + ": expected " +
                                           std::to_string(t.header_.size()) + " fields, got " +
                                           std::to_string(fields.size()));
      }
      t.rows_.push_back(std::move(fields));
      t.line_numbers_.push_back(line_no);
    }
    if (!have_header) throw Error(ErrorKind::kParse, t.source_ + ": missing header");
    return t;
  }

  static Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
    return parse(in, path);
  }

  static Table parse_string(const std::string& content, std::string_view source = "<string>") {
    std::istringstream in(content);
    return parse(in, source);
  }

  bool has_column(const std::string& name) const { return index_.contains(name); }

  std::size_t column(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorKind::kParse, source_ + ": missing column '" + name + "'");
    return it->second;
  }

  void require_columns(std::initializer_list<const char*> names) const {
    for (const char* n : names) column(n);
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
  const std::string& at(std::size_t row, const std::string& col) const { return rows_[row][column(col)]; }

  std::string where(std::size_t row) const {
    return source_ + ":" + std::to_string(line_numbers_[row]);
  }

  double number(std::size_t row, const std::string& col) const {
    return parse_double(at(row, col), where(row) + " column " + col);
  }
  std::int64_t integer(std::size_t row, const std::string& col) const {
    return parse_int(at(row, col), where(row) + " column " + col);
  }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

}  // namespace wastecollect::text
