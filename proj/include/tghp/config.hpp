#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tghp {

// Flat key-value configuration text with [section] headers. Keys are
// addressed as "section.key"; '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;  // comma separated

  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> section(const std::string& name) const;

  void write(std::ostream& os) const;
  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tghp
