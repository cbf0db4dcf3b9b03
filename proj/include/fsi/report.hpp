#pragma once

#include "fsi/types.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fsi {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

enum class Comparison {
  le,     // actual <= expected + tolerance
  ge,     // actual >= expected - tolerance
  gt,     // actual > expected
  close,  // |actual - expected| <= tolerance
};

std::string to_string(Comparison c);

enum class AssertionStatus { pass, fail, not_applicable };

std::string to_string(AssertionStatus s);

struct Assertion {
  std::string name;
  Comparison comparison = Comparison::le;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  AssertionStatus status = AssertionStatus::fail;
  std::string note;

  static Assertion check(std::string name, Comparison c, double expected, double actual,
                         double tolerance = 0.0);
  static Assertion not_applicable(std::string name, Comparison c, double expected,
                                  std::string note);
  bool failed() const { return status == AssertionStatus::fail; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  /// Comma separated, header line first.
  std::string to_csv() const;
};

/// Results of one experiment. Everything except `timings` is deterministic
/// for a fixed config and seed.
struct DiagnosticsReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> config;  // echo, in file order
  std::map<std::string, double> scalars;
  std::map<std::string, Table> tables;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;
  std::map<std::string, double> timings;  // seconds

  void add(Assertion a) { assertions.push_back(std::move(a)); }
  bool all_passed() const;
  const Assertion* find(const std::string& name) const;
  /// Appends everything from `other`, prefixing names with `prefix`.
  void merge(const DiagnosticsReport& other, const std::string& prefix);

  /// Deterministic body; timings go in a separate object when requested.
  std::string to_json(bool with_timings = true) const;
  std::string timings_json() const;
};

/// Write `text` to `path`, throwing InvalidArgument when the file cannot be opened.
void write_text_file(const std::string& path, const std::string& text);

/// Time series as CSV: t followed by one column per series.
std::string series_csv(const std::vector<double>& t, const Mat& columns,
                       const std::vector<std::string>& names);

}  // namespace fsi
