#include "fsi/config.hpp"

#include "fsi/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace fsi {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_type(const std::string& name, ValueType& t) {
  if (name == "int") t = ValueType::integer;
  else if (name == "real") t = ValueType::real;
  else if (name == "bool") t = ValueType::boolean;
  else if (name == "string") t = ValueType::string;
  else if (name == "int[]") t = ValueType::int_list;
  else if (name == "real[]") t = ValueType::real_list;
  else return false;
  return true;
}

bool parse_int(const std::string& s, long long& v) {
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  return !t.empty() && res.ec == std::errc() && res.ptr == t.data() + t.size();
}

bool parse_real(const std::string& s, double& v) {
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  return !t.empty() && res.ec == std::errc() && res.ptr == t.data() + t.size();
}

bool parse_bool(const std::string& s, bool& v) {
  const std::string t = trim(s);
  if (t == "true") v = true;
  else if (t == "false") v = false;
  else return false;
  return true;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

// Checks that the raw text is a valid literal of its declared type.
bool literal_ok(ValueType t, const std::string& raw) {
  long long i;
  double r;
  bool b;
  switch (t) {
    case ValueType::integer: return parse_int(raw, i);
    case ValueType::real: return parse_real(raw, r);
    case ValueType::boolean: return parse_bool(raw, b);
    case ValueType::string: return true;
    case ValueType::int_list:
      for (const auto& item : split_list(raw))
        if (!parse_int(item, i)) return false;
      return true;
    case ValueType::real_list:
      for (const auto& item : split_list(raw))
        if (!parse_real(item, r)) return false;
      return true;
  }
  return false;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidArgument("invalid config:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::integer: return "int";
    case ValueType::real: return "real";
    case ValueType::boolean: return "bool";
    case ValueType::string: return "string";
    case ValueType::int_list: return "int[]";
    case ValueType::real_list: return "real[]";
  }
  return "string";
}

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        problems.push_back(where + "malformed section header '" + t + "'");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    const auto colon = t.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon > eq) {
      problems.push_back(where + "expected 'key:type = value', got '" + t + "'");
      continue;
    }
    if (section.empty()) {
      problems.push_back(where + "entry outside of any [section]");
      continue;
    }
    const std::string key = trim(t.substr(0, colon));
    const std::string type_name = trim(t.substr(colon + 1, eq - colon - 1));
    ConfigValue v;
    v.raw = trim(t.substr(eq + 1));
    v.line = line_no;
    if (key.empty()) {
      problems.push_back(where + "empty key");
      continue;
    }
    if (!parse_type(type_name, v.type)) {
      problems.push_back(where + section + "." + key + ": unknown type '" + type_name + "'");
      continue;
    }
    if (!literal_ok(v.type, v.raw)) {
      problems.push_back(where + section + "." + key + ": '" + v.raw + "' is not a valid " + type_name);
      continue;
    }
    const std::string full = section + "." + key;
    if (cfg.index_.count(full)) {
      problems.push_back(where + full + ": duplicate key");
      continue;
    }
    cfg.index_[full] = cfg.entries_.size();
    cfg.entries_.emplace_back(full, v);
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ConfigValue* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto it = index_.find(section + "." + key);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

// ---------------------------------------------------------------- binder

const ConfigValue* ConfigBinder::take(const std::string& section, const std::string& key,
                                      std::initializer_list<ValueType> accepted) {
  used_.push_back(section + "." + key);
  const ConfigValue* v = file_.find(section, key);
  if (!v) return nullptr;
  if (std::find(accepted.begin(), accepted.end(), v->type) == accepted.end()) {
    fail(section, key, "declared as " + to_string(v->type) + ", expected " +
                           to_string(*accepted.begin()));
    return nullptr;
  }
  return v;
}

void ConfigBinder::record(const std::string& section, const std::string& key, ValueType type,
                          const std::string& value) {
  echo_.emplace_back(section + "." + key, value);
  echo_types_.push_back(type);
}

void ConfigBinder::bind(const std::string& section, const std::string& key, int& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::integer})) {
    long long x = 0;
    parse_int(v->raw, x);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(section, key, "value out of range");
    else
      out = int(x);
  }
  record(section, key, ValueType::integer, std::to_string(out));
}

void ConfigBinder::bind(const std::string& section, const std::string& key, std::uint64_t& out,
                        bool required) {
  const ConfigValue* v = take(section, key, {ValueType::integer});
  if (v) {
    long long x = 0;
    parse_int(v->raw, x);
    if (x < 0) fail(section, key, "must be non-negative");
    else out = std::uint64_t(x);
  } else if (required && file_.find(section, key) == nullptr) {
    fail(section, key, "required field is missing");
  }
  record(section, key, ValueType::integer, std::to_string(out));
}

void ConfigBinder::bind(const std::string& section, const std::string& key, double& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::real, ValueType::integer})) {
    parse_real(v->raw, out);
  }
  record(section, key, ValueType::real, format_double(out));
}

void ConfigBinder::bind(const std::string& section, const std::string& key, bool& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::boolean})) parse_bool(v->raw, out);
  record(section, key, ValueType::boolean, out ? "true" : "false");
}

void ConfigBinder::bind(const std::string& section, const std::string& key, std::string& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::string})) out = v->raw;
  record(section, key, ValueType::string, out);
}

void ConfigBinder::bind(const std::string& section, const std::string& key, std::vector<int>& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::int_list})) {
    out.clear();
    for (const auto& item : split_list(v->raw)) {
      long long x = 0;
      parse_int(item, x);
      out.push_back(int(x));
    }
  }
  std::vector<std::string> parts;
  for (int x : out) parts.push_back(std::to_string(x));
  record(section, key, ValueType::int_list, join(parts, ", "));
}

void ConfigBinder::bind(const std::string& section, const std::string& key,
                        std::vector<double>& out) {
  if (const ConfigValue* v = take(section, key, {ValueType::real_list, ValueType::int_list})) {
    out.clear();
    for (const auto& item : split_list(v->raw)) {
      double x = 0.0;
      parse_real(item, x);
      out.push_back(x);
    }
  }
  std::vector<std::string> parts;
  for (double x : out) parts.push_back(format_double(x));
  record(section, key, ValueType::real_list, join(parts, ", "));
}

void ConfigBinder::fail(const std::string& section, const std::string& key, const std::string& what) {
  const std::string full = section + "." + key;
  const ConfigValue* v = file_.find(section, key);
  problems_.push_back((v ? "line " + std::to_string(v->line) + ": " : std::string()) + full + ": " +
                      what);
}

void ConfigBinder::finish() {
  for (const auto& k : file_.keys()) {
    if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
      const auto dot = k.find('.');
      const ConfigValue* v = file_.find(k.substr(0, dot), k.substr(dot + 1));
      problems_.push_back("line " + std::to_string(v->line) + ": " + k + ": unknown field");
    }
  }
  if (!problems_.empty()) throw ConfigError(problems_);
}

std::string ConfigBinder::echo_text() const {
  std::string out;
  std::string section;
  for (std::size_t i = 0; i < echo_.size(); ++i) {
    const auto& [full, value] = echo_[i];
    const auto dot = full.find('.');
    const std::string s = full.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += full.substr(dot + 1) + ":" + to_string(echo_types_[i]) + " = " + value + "\n";
  }
  return out;
}

}  // namespace fsi
