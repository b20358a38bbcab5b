#include "rte/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rte {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig c;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_header) {
      if (t != "rteconfig v1")
        throw std::runtime_error("config: first line must be 'rteconfig v1', got '" +
                                 t + "'");
      saw_header = true;
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not 'key = value': '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    if (c.kv_.count(key))
      throw std::runtime_error("config: duplicate key '" + key + "'");
    c.kv_[key] = value;
  }
  if (!saw_header) throw std::runtime_error("config: missing 'rteconfig v1' header");
  return c;
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool KvConfig::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string KvConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw std::runtime_error("config: key '" + key + "' is not a number: '" +
                             it->second + "'");
  return v;
}

long KvConfig::get_long(const std::string& key, long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw std::runtime_error("config: key '" + key + "' is not an integer: '" +
                             it->second + "'");
  return v;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

std::string KvConfig::serialize() const {
  std::string out = "rteconfig v1\n";
  for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace rte
