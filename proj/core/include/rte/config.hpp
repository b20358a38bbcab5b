#pragma once

#include <map>
#include <string>

namespace rte {

//! Versioned key-value configuration text.  Format:
//!
//!   rteconfig v1
//!   # comment
//!   key = value
//!
//! Keys are trimmed, case-sensitive, and must be unique.  Values keep
//! internal whitespace.  serialize() round-trips (keys sorted).
class KvConfig {
 public:
  static KvConfig parse(const std::string& text);
  static KvConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace rte
