#pragma once

// Flat `key=value` files with dotted section keys, e.g.
//
//   fleet.capacity_kg = 4000
//   # comment
//   solver.objective = time

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wastecollect/error.hpp"
#include "wastecollect/text_table.hpp"

namespace wastecollect {

class KeyValues {
 public:
  static KeyValues parse(std::istream& in, std::string_view source) {
    KeyValues kv;
    kv.source_ = std::string(source);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto body = text::trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::kConfig, kv.source_ + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const std::string key(text::trim(body.substr(0, eq)));
      if (key.empty()) throw Error(ErrorKind::kConfig, kv.source_ + ":" + std::to_string(line_no) + ": empty key");
      if (kv.values_.contains(key)) {
        throw Error(ErrorKind::kConfig, kv.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
      kv.values_[key] = std::string(text::trim(body.substr(eq + 1)));
    }
    return kv;
  }

  static KeyValues read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kConfig, "cannot open " + path);
    auto kv = parse(in, path);
    kv.base_dir_ = std::filesystem::path(path).parent_path();
    return kv;
  }

  static KeyValues parse_string(const std::string& content, std::string_view source = "<string>") {
    std::istringstream in(content);
    return parse(in, source);
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  bool has_section(const std::string& prefix) const {
    const auto it = values_.lower_bound(prefix + ".");
    return it != values_.end() && it->first.starts_with(prefix + ".");
  }

  const std::string& str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::kConfig, source_ + ": missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  double number(const std::string& key) const {
    try {
      return text::parse_double(str(key), key);
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, source_ + ": " + e.what());
    }
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::int64_t integer(const std::string& key) const {
    try {
      return text::parse_int(str(key), key);
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, source_ + ": " + e.what());
    }
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  // A file path, resolved against the directory of the file it came from.
  std::string path(const std::string& key) const {
    std::filesystem::path p(str(key));
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p.lexically_normal().string();
  }

  // Keys that were never read; usually typos.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!used_.contains(k)) out.push_back(k);
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace wastecollect
