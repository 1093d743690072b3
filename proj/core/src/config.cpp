#include "specbias/config.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specbias/errors.hpp"

namespace specbias::experiments {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool looks_like_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

ConfigMap::Value parse_scalar(const std::string& raw, const std::string& origin,
                              const std::string& key) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
    return raw.substr(1, raw.size() - 2);
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (looks_like_integer(raw)) return static_cast<long>(std::stoll(raw));
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw config_error(origin + ": cannot parse value for '" + key + "': " + raw);
}

ConfigMap::Value parse_value(const std::string& raw, const std::string& origin,
                             const std::string& key) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']')
      throw config_error(origin + ": unterminated array for '" + key + "'");
    std::vector<long> ints;
    std::vector<double> doubles;
    bool all_int = true;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      ConfigMap::Value v = parse_scalar(item, origin, key);
      if (std::holds_alternative<long>(v)) {
        ints.push_back(std::get<long>(v));
        doubles.push_back(static_cast<double>(std::get<long>(v)));
      } else if (std::holds_alternative<double>(v)) {
        all_int = false;
        doubles.push_back(std::get<double>(v));
      } else {
        throw config_error(origin + ": arrays may only hold numbers ('" + key + "')");
      }
    }
    if (all_int) return ints;
    return doubles;
  }
  return parse_scalar(raw, origin, key);
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ConfigMap ConfigMap::from_toml_text(std::string_view text, const std::string& origin) {
  ConfigMap map;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string stripped = trim(strip_comment(line));
    if (stripped.empty()) continue;
    if (stripped.front() == '[')
      throw config_error(origin + ":" + std::to_string(lineno) +
                         ": tables are not supported; use flat keys");
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string raw = trim(stripped.substr(eq + 1));
    if (key.empty() || raw.empty())
      throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    map.values_[key] = parse_value(raw, origin, key);
  }
  return map;
}

ConfigMap ConfigMap::from_json_text(std::string_view text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(origin + ": " + e.what());
  }
  if (!j.is_object()) throw config_error(origin + ": top level must be an object");
  ConfigMap map;
  for (const auto& [key, val] : j.items()) {
    if (val.is_boolean()) {
      map.values_[key] = val.get<bool>();
    } else if (val.is_number_integer() || val.is_number_unsigned()) {
      map.values_[key] = static_cast<long>(val.get<std::int64_t>());
    } else if (val.is_number_float()) {
      map.values_[key] = val.get<double>();
    } else if (val.is_string()) {
      map.values_[key] = val.get<std::string>();
    } else if (val.is_array()) {
      bool all_int = true;
      for (const auto& item : val)
        if (!(item.is_number_integer() || item.is_number_unsigned())) all_int = false;
      if (all_int) {
        std::vector<long> v;
        for (const auto& item : val) v.push_back(static_cast<long>(item.get<std::int64_t>()));
        map.values_[key] = std::move(v);
      } else {
        std::vector<double> v;
        for (const auto& item : val) {
          if (!item.is_number())
            throw config_error(origin + ": arrays may only hold numbers ('" + key + "')");
          v.push_back(item.get<double>());
        }
        map.values_[key] = std::move(v);
      }
    } else {
      throw config_error(origin + ": unsupported value type for '" + key + "'");
    }
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open config file: " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string ext = file.extension().string();
  if (ext == ".json") return from_json_text(buffer.str(), file.string());
  if (ext == ".toml") return from_toml_text(buffer.str(), file.string());
  throw config_error("unrecognized config extension (want .toml or .json): " +
                     file.string());
}

const ConfigMap::Value& ConfigMap::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing config key: " + key);
  read_[key] = true;
  return it->second;
}

long ConfigMap::get_int(const std::string& key) const {
  const Value& v = lookup(key);
  if (std::holds_alternative<long>(v)) return std::get<long>(v);
  throw config_error("config key '" + key + "' must be an integer");
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
  const Value& v = lookup(key);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<long>(v)) return static_cast<double>(std::get<long>(v));
  throw config_error("config key '" + key + "' must be a number");
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = lookup(key);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  throw config_error("config key '" + key + "' must be a boolean");
}

std::string ConfigMap::get_string(const std::string& key) const {
  const Value& v = lookup(key);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  throw config_error("config key '" + key + "' must be a string");
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<long> ConfigMap::get_int_list(const std::string& key) const {
  const Value& v = lookup(key);
  if (std::holds_alternative<std::vector<long>>(v))
    return std::get<std::vector<long>>(v);
  if (std::holds_alternative<long>(v)) return {std::get<long>(v)};
  throw config_error("config key '" + key + "' must be a list of integers");
}

void ConfigMap::set_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("override must look like key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string raw = trim(assignment.substr(eq + 1));
  values_[key] = parse_value(raw, "<override>", key);
}

std::vector<std::string> ConfigMap::unread_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (!read_.count(key)) out.push_back(key);
  return out;
}

std::string ConfigMap::canonical_string() const {
  std::ostringstream out;
  char buf[64];
  for (const auto& [key, value] : values_) {
    out << key << '=';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, long>) {
            out << v;
          } else if constexpr (std::is_same_v<T, double>) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf;
          } else if constexpr (std::is_same_v<T, bool>) {
            out << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            out << '"' << v << '"';
          } else if constexpr (std::is_same_v<T, std::vector<long>>) {
            out << '[';
            for (std::size_t i = 0; i < v.size(); ++i)
              out << (i ? "," : "") << v[i];
            out << ']';
          } else {
            out << '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
              std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
              out << (i ? "," : "") << buf;
            }
            out << ']';
          }
        },
        value);
    out << ';';
  }
  return out.str();
}

std::string config_hash(const ConfigMap& config) {
  const std::string s = config.canonical_string();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace specbias::experiments
