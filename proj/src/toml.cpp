#include "mecsim/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mecsim/errors.hpp"

namespace mecsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_integer_token(const std::string& t) {
  std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  }
  return true;
}

double parse_number(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("toml line " + std::to_string(line) + ": bad number '" + tok + "'");
  }
}

TomlValue parse_value(const std::string& raw, int line) {
  TomlValue v;
  v.line = line;
  if (raw.empty()) throw ConfigError("toml line " + std::to_string(line) + ": missing value");

  if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.b = (raw == "true");
    return v;
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ConfigError("toml line " + std::to_string(line) + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      char c = raw[i];
      if (c == '\\' && i + 2 < raw.size()) {
        char e = raw[++i];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default:
            throw ConfigError("toml line " + std::to_string(line) + ": unsupported escape");
        }
      } else {
        out.push_back(c);
      }
    }
    v.kind = TomlValue::Kind::string;
    v.s = std::move(out);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("toml line " + std::to_string(line) + ": unterminated array");
    v.kind = TomlValue::Kind::number_array;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      v.arr.push_back(parse_number(item, line));
    }
    return v;
  }
  if (is_integer_token(raw)) {
    v.kind = TomlValue::Kind::integer;
    v.i = std::strtoll(raw.c_str(), nullptr, 10);
    v.f = static_cast<double>(v.i);
    return v;
  }
  v.kind = TomlValue::Kind::real;
  v.f = parse_number(raw, line);
  return v;
}

}  // namespace

TomlDoc parse_toml(const std::string& text) {
  TomlDoc doc;
  std::string section;  // keys before any [section] land in ""
  doc[section];
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    // strip comments outside strings
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("toml line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("toml line " + std::to_string(lineno) + ": empty section name");
      doc[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("toml line " + std::to_string(lineno) + ": empty key");
    if (doc[section].count(key))
      throw ConfigError("toml line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    doc[section][key] = parse_value(val, lineno);
  }
  return doc;
}

TomlDoc parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

SectionReader::SectionReader(const TomlDoc& doc, const std::string& section) : section_(section) {
  auto it = doc.find(section);
  sec_ = (it == doc.end()) ? nullptr : &it->second;
}

const TomlValue* SectionReader::find(const std::string& key) {
  seen_.insert(key);
  if (!sec_) return nullptr;
  auto it = sec_->find(key);
  return (it == sec_->end()) ? nullptr : &it->second;
}

bool SectionReader::has(const std::string& key) const {
  return sec_ && sec_->count(key) > 0;
}

double SectionReader::get_double(const std::string& key, double fallback) {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind == TomlValue::Kind::integer) return static_cast<double>(v->i);
  if (v->kind == TomlValue::Kind::real) return v->f;
  throw ConfigError("[" + section_ + "] " + key + ": expected a number");
}

std::int64_t SectionReader::get_int(const std::string& key, std::int64_t fallback) {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind == TomlValue::Kind::integer) return v->i;
  throw ConfigError("[" + section_ + "] " + key + ": expected an integer");
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind == TomlValue::Kind::boolean) return v->b;
  throw ConfigError("[" + section_ + "] " + key + ": expected true or false");
}

std::string SectionReader::get_string(const std::string& key, const std::string& fallback) {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind == TomlValue::Kind::string) return v->s;
  throw ConfigError("[" + section_ + "] " + key + ": expected a string");
}

std::vector<double> SectionReader::get_array(const std::string& key,
                                             const std::vector<double>& fallback) {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind == TomlValue::Kind::number_array) return v->arr;
  throw ConfigError("[" + section_ + "] " + key + ": expected an array of numbers");
}

void SectionReader::finish() const {
  if (!sec_) return;
  for (const auto& [key, value] : *sec_) {
    if (!seen_.count(key)) {
      throw ConfigError("[" + section_ + "] unknown key '" + key + "' (line " +
                        std::to_string(value.line) + ")");
    }
  }
}

void require_sections(const TomlDoc& doc, const std::set<std::string>& allowed) {
  for (const auto& [name, sec] : doc) {
    if (name.empty()) {
      if (!sec.empty())
        throw ConfigError("top-level keys are not allowed; put '" + sec.begin()->first +
                          "' in a section");
      continue;
    }
    if (!allowed.count(name)) throw ConfigError("unknown config section [" + name + "]");
  }
}

}  // namespace mecsim
