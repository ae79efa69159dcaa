#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hydrorom/common.hpp"

namespace rom {

/// Multimap of `key = value` lines.  '#' starts a comment, blank lines are
/// skipped, repeated keys accumulate in order.
using KeyValues = std::map<std::string, std::vector<std::string>>;

KeyValues parse_key_values_text(const std::string& text);
KeyValues parse_key_values(const std::filesystem::path& path);

/// Typed single-value lookups; throw ArgumentError on malformed values or
/// when a repeated key is given where one value is expected.
double kv_double(const KeyValues& kv, const std::string& key, double fallback);
int kv_int(const KeyValues& kv, const std::string& key, int fallback);
std::uint64_t kv_u64(const KeyValues& kv, const std::string& key, std::uint64_t fallback);
std::string kv_string(const KeyValues& kv, const std::string& key,
                      const std::string& fallback);

/// Splits "a,b,c" on commas and trims whitespace.
std::vector<std::string> split_csv(const std::string& s);
double to_double(const std::string& s, const std::string& context);
int to_int(const std::string& s, const std::string& context);

}  // namespace rom
