#include "fsi/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fsi {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::le: return "le";
    case Comparison::ge: return "ge";
    case Comparison::gt: return "gt";
    case Comparison::close: return "close";
  }
  return "le";
}

std::string to_string(AssertionStatus s) {
  switch (s) {
    case AssertionStatus::pass: return "pass";
    case AssertionStatus::fail: return "fail";
    case AssertionStatus::not_applicable: return "not_applicable";
  }
  return "fail";
}

Assertion Assertion::check(std::string name, Comparison c, double expected, double actual,
                           double tolerance) {
  Assertion a;
  a.name = std::move(name);
  a.comparison = c;
  a.expected = expected;
  a.actual = actual;
  a.tolerance = tolerance;
  bool ok = false;
  if (std::isfinite(actual)) {
    switch (c) {
      case Comparison::le: ok = actual <= expected + tolerance; break;
      case Comparison::ge: ok = actual >= expected - tolerance; break;
      case Comparison::gt: ok = actual > expected; break;
      case Comparison::close: ok = std::abs(actual - expected) <= tolerance; break;
    }
  }
  a.status = ok ? AssertionStatus::pass : AssertionStatus::fail;
  return a;
}

Assertion Assertion::not_applicable(std::string name, Comparison c, double expected,
                                    std::string note) {
  Assertion a;
  a.name = std::move(name);
  a.comparison = c;
  a.expected = expected;
  a.actual = std::nan("");
  a.status = AssertionStatus::not_applicable;
  a.note = std::move(note);
  return a;
}

void Table::add_row(std::vector<double> row) {
  require(row.size() == columns.size(), "Table::add_row: expected " +
                                            std::to_string(columns.size()) + " values");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += '\n';
  }
  return out;
}

bool DiagnosticsReport::all_passed() const {
  for (const auto& a : assertions)
    if (a.failed()) return false;
  return true;
}

const Assertion* DiagnosticsReport::find(const std::string& name) const {
  for (const auto& a : assertions)
    if (a.name == name) return &a;
  return nullptr;
}

void DiagnosticsReport::merge(const DiagnosticsReport& other, const std::string& prefix) {
  for (const auto& [k, v] : other.scalars) scalars[prefix + k] = v;
  for (const auto& [k, v] : other.tables) tables[prefix + k] = v;
  for (auto a : other.assertions) {
    a.name = prefix + a.name;
    assertions.push_back(std::move(a));
  }
  for (const auto& n : other.notes) notes.push_back(prefix + n);
  for (const auto& [k, v] : other.timings) timings[prefix + k] = v;
}

namespace {

using nlohmann::ordered_json;

// Non-finite values have no JSON literal; they are written as strings.
ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

std::string DiagnosticsReport::to_json(bool with_timings) const {
  ordered_json j;
  j["id"] = id;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  ordered_json sc = ordered_json::object();
  for (const auto& [k, v] : scalars) sc[k] = number(v);
  j["scalars"] = sc;
  ordered_json tb = ordered_json::object();
  for (const auto& [name, t] : tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json r = ordered_json::array();
      for (double v : row) r.push_back(number(v));
      rows.push_back(r);
    }
    tb[name] = {{"columns", t.columns}, {"rows", rows}};
  }
  j["tables"] = tb;
  ordered_json as = ordered_json::array();
  for (const auto& a : assertions) {
    ordered_json e;
    e["name"] = a.name;
    e["status"] = to_string(a.status);
    e["comparison"] = to_string(a.comparison);
    e["expected"] = number(a.expected);
    e["actual"] = number(a.actual);
    e["tolerance"] = number(a.tolerance);
    if (!a.note.empty()) e["note"] = a.note;
    as.push_back(e);
  }
  j["assertions"] = as;
  j["notes"] = notes;
  j["passed"] = all_passed();
  if (with_timings) {
    ordered_json tm = ordered_json::object();
    for (const auto& [k, v] : timings) tm[k] = number(v);
    j["timings"] = tm;
  }
  return j.dump(2) + "\n";
}

std::string DiagnosticsReport::timings_json() const {
  ordered_json tm = ordered_json::object();
  for (const auto& [k, v] : timings) tm[k] = number(v);
  return tm.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << text;
  if (!out) throw InvalidArgument("failed writing " + path);
}

std::string series_csv(const std::vector<double>& t, const Mat& columns,
                       const std::vector<std::string>& names) {
  require(Index(t.size()) == columns.rows(), "series_csv: row count mismatch");
  require(Index(names.size()) == columns.cols(), "series_csv: name count mismatch");
  std::ostringstream out;
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    out << format_double(t[k]);
    for (Index c = 0; c < columns.cols(); ++c) out << ',' << format_double(columns(Index(k), c));
    out << '\n';
  }
  return out.str();
}

}  // namespace fsi
