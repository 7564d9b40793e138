#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpdrift/error.hpp"
#include "gpdrift/experiments/config.hpp"
#include "gpdrift/simulate/drift.hpp"

namespace gpdrift::exp {

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"schema_version", "experiment", "model",     "drift",      "theta",
                                             "T",              "N",          "scheme",    "replications", "metric",
                                             "value",          "reference",  "tolerance", "comparator", "pass",
                                             "note"};
  return cols;
}

/// How a row's verdict follows from (value, reference, tolerance).
///   abs_le: |value - reference| <= tolerance
///   le:     value <= reference + tolerance
///   lt:     value < reference
///   ge:     value >= reference - tolerance
///   gt:     value > reference
///   info:   no check, always passes
///   error:  the computation failed; never passes
enum class Comparator { abs_le, le, lt, ge, gt, info, error };

inline std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::abs_le: return "abs_le";
    case Comparator::le: return "le";
    case Comparator::lt: return "lt";
    case Comparator::ge: return "ge";
    case Comparator::gt: return "gt";
    case Comparator::info: return "info";
    case Comparator::error: return "error";
  }
  return "unknown";
}

inline bool evaluate(Comparator c, double value, double reference, double tolerance) {
  switch (c) {
    case Comparator::abs_le: return std::abs(value - reference) <= tolerance;
    case Comparator::le: return value <= reference + tolerance;
    case Comparator::lt: return value < reference;
    case Comparator::ge: return value >= reference - tolerance;
    case Comparator::gt: return value > reference;
    case Comparator::info: return true;
    case Comparator::error: return false;
  }
  return false;
}

struct Row {
  std::string scheme;
  double T = 0.0;
  std::size_t N = 0;
  std::string metric;
  double value = 0.0;
  std::optional<double> reference;
  double tolerance = 0.0;
  Comparator comparator = Comparator::info;
  bool pass = true;
  std::string note;
};

class Report {
 public:
  explicit Report(const ExperimentConfig& config) : config_(config) {}

  const ExperimentConfig& config() const noexcept { return config_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  /// Adds a checked row; the verdict is computed here.
  Row& check(std::string scheme, double T, std::size_t N, std::string metric, double value, Comparator cmp,
             double reference, double tolerance, std::string note = {}) {
    Row r{std::move(scheme), T, N, std::move(metric), value, reference, tolerance, cmp, false, std::move(note)};
    r.pass = std::isfinite(value) && evaluate(cmp, value, reference, tolerance);
    rows_.push_back(std::move(r));
    return rows_.back();
  }

  Row& info(std::string scheme, double T, std::size_t N, std::string metric, double value, std::string note = {}) {
    rows_.push_back(Row{std::move(scheme), T, N, std::move(metric), value, std::nullopt, 0.0, Comparator::info, true,
                        std::move(note)});
    return rows_.back();
  }

  Row& error(std::string scheme, double T, std::size_t N, std::string metric, const std::exception& e) {
    rows_.push_back(Row{std::move(scheme), T, N, std::move(metric), std::nan(""), std::nullopt, 0.0,
                        Comparator::error, false, e.what()});
    return rows_.back();
  }

  std::size_t failed() const {
    std::size_t k = 0;
    for (const auto& r : rows_) k += r.pass ? 0 : 1;
    return k;
  }
  bool has_error() const {
    for (const auto& r : rows_) {
      if (r.comparator == Comparator::error) return true;
    }
    return false;
  }

  ExitCode exit_code() const {
    if (has_error()) return ExitCode::solver;
    if (failed() > 0) return ExitCode::statistical;
    return ExitCode::ok;
  }

 private:
  ExperimentConfig config_;
  std::vector<Row> rows_;
};

/// 17 significant digits, enough to round-trip a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const Report& report) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  const auto& c = report.config();
  const std::string experiment = to_string(c.experiment);
  const std::string model = csv_field(kernels::describe(c.model));
  const std::string drift = csv_field(sim::describe(c.drift));
  for (const auto& r : report.rows()) {
    os << kSchemaVersion << ',' << experiment << ',' << model << ',' << drift << ',' << format_double(c.theta) << ','
       << format_double(r.T) << ',' << r.N << ',' << csv_field(r.scheme) << ',' << c.replications << ','
       << csv_field(r.metric) << ',' << format_double(r.value) << ','
       << (r.reference ? format_double(*r.reference) : std::string()) << ',' << format_double(r.tolerance) << ','
       << to_string(r.comparator) << ',' << (r.pass ? "true" : "false") << ',' << csv_field(r.note) << '\n';
  }
}

inline std::string csv_string(const Report& report) {
  std::ostringstream os;
  write_csv(os, report);
  return os.str();
}

}  // namespace gpdrift::exp
