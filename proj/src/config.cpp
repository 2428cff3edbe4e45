#include "bsmc/config.hpp"

#include <fstream>
#include <stdexcept>

#include "bsmc/matrix_io.hpp"

namespace bsmc::io {

Config Config::read(std::istream& in) {
  Config cfg;
  TokenReader reader(in);
  std::string key;
  while (reader.next(key)) {
    cfg.values_[key] = reader.expect("value for key '" + key + "'");
  }
  return cfg;
}

Config Config::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return read(in);
}

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = raw(key);
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size()) throw std::runtime_error("config key '" + key + "' is not a number: " + s);
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw std::runtime_error("config key '" + key + "' is not an integer");
  return i;
}

}  // namespace bsmc::io
