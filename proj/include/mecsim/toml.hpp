#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mecsim {

// Minimal TOML subset: [section] headers, key = value lines, # comments.
// Values: integers, floats, booleans, quoted strings, and flat numeric arrays.
// That covers every config file this project reads; nothing else is accepted.

struct TomlValue {
  enum class Kind { integer, real, boolean, string, number_array };
  Kind kind = Kind::integer;
  std::int64_t i = 0;
  double f = 0.0;
  bool b = false;
  std::string s;
  std::vector<double> arr;
  int line = 0;
};

using TomlSection = std::map<std::string, TomlValue>;
using TomlDoc = std::map<std::string, TomlSection>;

TomlDoc parse_toml(const std::string& text);
TomlDoc parse_toml_file(const std::string& path);

// Typed access to one section with unknown-key detection: every key a consumer
// reads is marked, and finish() rejects whatever was never asked for.
class SectionReader {
 public:
  SectionReader(const TomlDoc& doc, const std::string& section);

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::vector<double> get_array(const std::string& key, const std::vector<double>& fallback);

  // Throws ConfigError naming any key present in the file but never consumed.
  void finish() const;

 private:
  const TomlValue* find(const std::string& key);
  std::string section_;
  const TomlSection* sec_ = nullptr;
  std::set<std::string> seen_;
};

// Rejects sections other than the listed ones.
void require_sections(const TomlDoc& doc, const std::set<std::string>& allowed);

}  // namespace mecsim
