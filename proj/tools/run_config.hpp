#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gwpath/offspring.hpp"

namespace gwpath::cli {

// Flat "key = value" text grouped under [section] headers; '#' starts a comment.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key,
                                     const std::vector<std::int64_t>& fallback) const;
  LawPtr get_law(const std::string& section, const std::string& key, LawPtr fallback) const;

  // Throws ConfigError naming any section or key that no getter asked for.
  void reject_unused() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  mutable std::set<std::pair<std::string, std::string>> used_;
};

// binary:P0 | geometric:MEAN | power_law:ALPHA,KMIN | pmf:P0,P1,... | percolated:ALPHA,KMIN,LAMBDA,N
LawPtr parse_law(const std::string& spec);

}  // namespace gwpath::cli
