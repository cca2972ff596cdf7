#pragma once

#include <map>
#include <string>
#include <vector>

namespace caclab {

/// Line-oriented `key = value` configuration. `#` starts a comment, blank
/// lines are skipped. Keys are dotted paths (e.g. "class.1.lambda").
/// Serialization emits keys in sorted order so files are reproducible.
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);

  /// Keys that start with `prefix`, in sorted order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  std::string serialize() const;
  void save_file(const std::string& path) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

/// Formats a double with 17 significant digits; round-trips binary64 exactly.
std::string format_double(double v);

/// Parses a double, throwing std::invalid_argument on trailing garbage.
double parse_double(const std::string& text);

}  // namespace caclab
