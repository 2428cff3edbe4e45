#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace bsmc::io {

/// Flat key-value configuration: one `key value` pair per line, '#' starts a
/// comment. Unknown keys are kept (callers decide what they need).
class Config {
 public:
  static Config read(std::istream& in);
  static Config read_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace bsmc::io
