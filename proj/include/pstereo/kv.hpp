#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pstereo {

// Minimal "key = value" file support shared by the calibration and scene
// readers. '#' starts a comment; blank lines are skipped; duplicate keys are
// a parse error.
struct KvFile {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
};

// Parses text; throws ConfigError on malformed lines or duplicate keys.
KvFile parse_kv_text(const std::string& text, const std::string& origin);

// Loads and parses a file; throws IoError(missing_file) if unreadable.
KvFile load_kv_file(const std::string& path);

// Typed getters. The non-defaulted forms throw ConfigError when the key is
// absent; all of them throw ConfigError when the value does not parse.
double kv_double(const KvFile& kv, const std::string& key);
double kv_double_or(const KvFile& kv, const std::string& key, double fallback);
long long kv_int(const KvFile& kv, const std::string& key);
long long kv_int_or(const KvFile& kv, const std::string& key,
                    long long fallback);
std::string kv_string_or(const KvFile& kv, const std::string& key,
                         const std::string& fallback);

}  // namespace pstereo
