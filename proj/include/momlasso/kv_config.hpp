#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace momlasso {

// Flat key-value text format shared by config files and dataset sidecars:
//
//   # comment
//   key = value
//   list_key = 1, 2, 3
//
// Keys are [a-z0-9_-]; blank lines and '#' comments are ignored; a repeated
// key overrides the earlier value.
class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;
  std::string dump() const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
  void erase(const std::string& key) { values_.erase(key); }

  /// Later values win.
  void merge(const KeyValues& other);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::string trim(const std::string& s);

}  // namespace momlasso
