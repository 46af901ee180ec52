#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "petzkit/errors.hpp"

namespace petzkit::batch {

inline constexpr int kCsvSchemaVersion = 1;

/// 12 significant digits, shortest of fixed/scientific ("%.12g").
inline std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string fmt_num(long long x) { return std::to_string(x); }
inline std::string fmt_num(int x) { return std::to_string(x); }
inline std::string fmt_num(unsigned long long x) { return std::to_string(x); }
inline std::string fmt_num(unsigned long x) { return std::to_string(x); }
inline std::string fmt_num(long x) { return std::to_string(x); }

/// In-memory CSV: a version-stamp comment line, a header row, then rows.
/// LF line endings, no quoting (fields never contain commas).
class CsvTable {
 public:
  CsvTable(std::string kind, std::vector<std::string> columns)
      : kind_(std::move(kind)), columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> fields) {
    if (fields.size() != columns_.size()) {
      throw Error("csv row width differs from the header");
    }
    rows_.push_back(std::move(fields));
  }

  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }

  std::string str() const {
    std::ostringstream os;
    os << "# petzkit " << kind_ << " v" << kCsvSchemaVersion << '\n';
    write_line(os, columns_);
    for (const auto& r : rows_) write_line(os, r);
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << str();
    if (!f) throw IoError("write to '" + path + "' failed");
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      os << fields[i];
    }
    os << '\n';
  }

  std::string kind_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace petzkit::batch
