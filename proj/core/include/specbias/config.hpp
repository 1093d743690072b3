#ifndef SPECBIAS_CONFIG_HPP
#define SPECBIAS_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace specbias::experiments {

/// Flat key -> typed-value configuration, loaded from a TOML file (the
/// flat key = value subset: ints, floats, bools, quoted strings, and
/// one-level arrays of numbers) or from a JSON object. Unknown keys are
/// kept and can be listed so callers may reject typos.
class ConfigMap {
 public:
  using Value = std::variant<long, double, bool, std::string, std::vector<long>,
                             std::vector<double>>;

  ConfigMap() = default;

  /// Dispatches on extension: .toml or .json. Throws config_error with
  /// the path on open/parse failure.
  static ConfigMap load(const std::filesystem::path& file);
  static ConfigMap from_toml_text(std::string_view text, const std::string& origin = "<toml>");
  static ConfigMap from_json_text(std::string_view text, const std::string& origin = "<json>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<long> get_int_list(const std::string& key) const;

  /// CLI override: `key=value`, value parsed with the TOML value rules.
  void set_override(const std::string& assignment);

  /// Keys never read through a getter; used to flag typos after assembly.
  std::vector<std::string> unread_keys() const;

  /// Canonical "k=v;k=v" rendering (sorted keys), used for config hashes.
  std::string canonical_string() const;

 private:
  std::map<std::string, Value> values_;
  mutable std::map<std::string, bool> read_;

  const Value& lookup(const std::string& key) const;
};

/// FNV-1a of the canonical string; stable across runs and platforms.
std::string config_hash(const ConfigMap& config);

}  // namespace specbias::experiments

#endif  // SPECBIAS_CONFIG_HPP
