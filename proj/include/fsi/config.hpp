#pragma once

#include "fsi/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fsi {

/// Every problem found while reading or validating a config, one per line.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class ValueType { integer, real, boolean, string, int_list, real_list };

std::string to_string(ValueType t);

struct ConfigValue {
  ValueType type = ValueType::string;
  std::string raw;
  int line = 0;
};

/// Sectioned key-value file with explicit types:
///
///   # comment
///   [model]
///   kind:string = heatwave
///   n_f:int = 60
///   T:real = 1
///   levels:int[] = 16, 32, 64
///
/// Types: int, real, bool, string, int[], real[]. Keys are unique per section.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  const ConfigValue* find(const std::string& section, const std::string& key) const;
  /// "section.key" for every entry, in file order.
  std::vector<std::string> keys() const;

 private:
  std::vector<std::pair<std::string, ConfigValue>> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Reads typed fields out of a ConfigFile, collecting problems instead of
/// stopping at the first one, and records the effective value of every
/// field (defaults included) for the config echo.
class ConfigBinder {
 public:
  explicit ConfigBinder(const ConfigFile& file) : file_(file) {}

  void bind(const std::string& section, const std::string& key, int& out);
  void bind(const std::string& section, const std::string& key, std::uint64_t& out,
            bool required = false);
  void bind(const std::string& section, const std::string& key, double& out);
  void bind(const std::string& section, const std::string& key, bool& out);
  void bind(const std::string& section, const std::string& key, std::string& out);
  void bind(const std::string& section, const std::string& key, std::vector<int>& out);
  void bind(const std::string& section, const std::string& key, std::vector<double>& out);

  /// Records a validation problem for a field.
  void fail(const std::string& section, const std::string& key, const std::string& what);
  /// Throws ConfigError when any problem (including unknown keys) was recorded.
  void finish();

  const std::vector<std::pair<std::string, std::string>>& echo() const { return echo_; }
  /// Echo as a config file that parses back to the same settings.
  std::string echo_text() const;

 private:
  const ConfigValue* take(const std::string& section, const std::string& key,
                          std::initializer_list<ValueType> accepted);
  void record(const std::string& section, const std::string& key, ValueType type,
              const std::string& value);

  const ConfigFile& file_;
  std::vector<std::string> problems_;
  std::vector<std::string> used_;
  std::vector<std::pair<std::string, std::string>> echo_;
  std::vector<ValueType> echo_types_;
};

}  // namespace fsi
