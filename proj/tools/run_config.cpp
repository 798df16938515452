#include "run_config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gwpath/config_model.hpp"
#include "gwpath/errors.hpp"

namespace gwpath::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <class Int>
bool to_int(const std::string& s, Int& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec == std::errc() && ptr == end) return true;
  // Accept integral values written in floating notation, e.g. 1e5.
  double d = 0.0;
  if (!to_double(s, d) || d != static_cast<double>(static_cast<Int>(d))) return false;
  out = static_cast<Int>(d);
  return true;
}

std::vector<double> law_args(const std::string& spec, const std::string& args, std::size_t count) {
  const auto items = split_list(args);
  if (count != 0 && items.size() != count) {
    throw ConfigError("law '" + spec + "' needs " + std::to_string(count) + " argument(s)");
  }
  std::vector<double> out;
  for (const auto& item : items) {
    double v = 0.0;
    if (!to_double(item, v)) throw ConfigError("law '" + spec + "': '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line);
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!cfg.sections_[section].emplace(key, Entry{value, line}).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

const RunConfig::Entry* RunConfig::find(const std::string& section, const std::string& key) const {
  used_.emplace(section, key);
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void RunConfig::fail(const std::string& section, const std::string& key, const std::string& why) const {
  const Entry* e = find(section, key);
  throw ConfigError(origin_ + ":" + std::to_string(e ? e->line : 0) + ": [" + section + "] " + key + ": " + why);
}

bool RunConfig::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string RunConfig::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!to_double(e->value, v)) fail(section, key, "expected a number");
  return v;
}

std::int64_t RunConfig::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::int64_t v = 0;
  if (!to_int(e->value, v)) fail(section, key, "expected an integer");
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  if (!to_int(e->value, v)) fail(section, key, "expected an unsigned integer");
  return v;
}

std::vector<double> RunConfig::get_doubles(const std::string& section, const std::string& key,
                                           const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) {
    double v = 0.0;
    if (!to_double(item, v)) fail(section, key, "'" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> RunConfig::get_ints(const std::string& section, const std::string& key,
                                              const std::vector<std::int64_t>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(e->value)) {
    std::int64_t v = 0;
    if (!to_int(item, v)) fail(section, key, "'" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

LawPtr RunConfig::get_law(const std::string& section, const std::string& key, LawPtr fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    return parse_law(e->value);
  } catch (const Error& err) {
    fail(section, key, err.what());
  }
}

void RunConfig::reject_unused() const {
  for (const auto& [section, keys] : sections_) {
    bool section_used = false;
    for (const auto& [s, k] : used_) section_used = section_used || s == section;
    if (!section_used) throw ConfigError(origin_ + ": unknown section [" + section + "]");
    for (const auto& [key, entry] : keys) {
      if (!used_.count({section, key})) {
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

LawPtr parse_law(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("law '" + spec + "' must look like name:args");
  const std::string name = trim(std::string_view(spec).substr(0, colon));
  const std::string args = spec.substr(colon + 1);
  try {
    if (name == "binary") return binary_law(law_args(spec, args, 1)[0]);
    if (name == "geometric") return geometric_law(law_args(spec, args, 1)[0]);
    if (name == "power_law") {
      const auto a = law_args(spec, args, 2);
      return power_law(a[0], static_cast<std::int64_t>(a[1]));
    }
    if (name == "pmf") return std::make_shared<TabulatedLaw>(law_args(spec, args, 0), "pmf:" + trim(args));
    if (name == "percolated") {
      const auto a = law_args(spec, args, 4);
      return make_degree_model(a[0], static_cast<std::int64_t>(a[1]), a[2], static_cast<std::int64_t>(a[3])).percolated;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("law '" + spec + "': " + e.what());
  }
  throw ConfigError("unknown law family '" + name + "'");
}

}  // namespace gwpath::cli
