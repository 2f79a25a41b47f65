#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adaptgear {

using ReportValue = std::variant<std::int64_t, double, std::string>;

/// Flat table of records with a fixed column order.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<ReportValue>> rows;

  void add_row(std::vector<ReportValue> row);
  friend bool operator==(const ReportTable&, const ReportTable&) = default;
};

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_report_format(std::string_view name);

/// JSON: an array of objects whose keys follow column order. CSV: a header
/// line followed by one line per row; strings are always quoted and reals
/// always carry a decimal point or exponent so types survive parsing.
void emit_report(const ReportTable& table, ReportFormat format, std::ostream& out);
void emit_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& path);

ReportTable parse_report(std::istream& in, ReportFormat format);
ReportTable parse_report(const std::filesystem::path& path, ReportFormat format);

/// Shortest round-trip text for a real, always recognisable as a real.
std::string format_real(double value);

}  // namespace adaptgear
