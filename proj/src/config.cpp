#include "hydrorom/config.hpp"

#include <cstdlib>
#include <sstream>

namespace rom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::string* single_value(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) return nullptr;
  if (it->second.size() != 1)
    throw ArgumentError("config key '" + key + "' given more than once");
  return &it->second.front();
}

}  // namespace

KeyValues parse_key_values_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("config line " + std::to_string(lineno) +
                          " is not 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ArgumentError("config line " + std::to_string(lineno) + " has empty key");
    kv[key].push_back(value);
  }
  return kv;
}

KeyValues parse_key_values(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values_text(buf.str());
}

double to_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ArgumentError("expected a number for " + context + ", got '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ArgumentError("expected an integer for " + context + ", got '" + s + "'");
  return static_cast<int>(v);
}

double kv_double(const KeyValues& kv, const std::string& key, double fallback) {
  const std::string* v = single_value(kv, key);
  return v ? to_double(*v, key) : fallback;
}

int kv_int(const KeyValues& kv, const std::string& key, int fallback) {
  const std::string* v = single_value(kv, key);
  return v ? to_int(*v, key) : fallback;
}

std::uint64_t kv_u64(const KeyValues& kv, const std::string& key,
                     std::uint64_t fallback) {
  const std::string* v = single_value(kv, key);
  if (!v) return fallback;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0')
    throw ArgumentError("expected an unsigned integer for " + key + ", got '" + *v + "'");
  return static_cast<std::uint64_t>(x);
}

std::string kv_string(const KeyValues& kv, const std::string& key,
                      const std::string& fallback) {
  const std::string* v = single_value(kv, key);
  return v ? *v : fallback;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) out.push_back(trim(cur));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

}  // namespace rom
