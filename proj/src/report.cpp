#include "adaptgear/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "adaptgear/error.hpp"

namespace adaptgear {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_field(const ReportValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return format_real(*d);
  return csv_quote(std::get<std::string>(v));
}

// Splits one CSV record; quoted fields may contain separators, doubled quotes
// and newlines (hence the stream).
bool read_csv_record(std::istream& in, std::vector<std::pair<std::string, bool>>& fields) {
  fields.clear();
  int c = in.peek();
  if (c == EOF) return false;
  std::string cur;
  bool quoted = false;
  bool in_quotes = false;
  while ((c = in.get()) != EOF) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          cur += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        cur += static_cast<char>(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(std::move(cur), quoted);
      cur.clear();
      quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += static_cast<char>(c);
    }
  }
  if (in_quotes) throw Error("unterminated quoted CSV field");
  fields.emplace_back(std::move(cur), quoted);
  return true;
}

ReportValue parse_csv_value(const std::string& text, bool quoted) {
  if (quoted) return text;
  const char* b = text.data();
  const char* e = b + text.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc{} && p == e) return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc{} && p == e) return d;
  throw Error("unparseable CSV value '" + text + "'");
}

ordered_json to_json_value(const ReportValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

ReportValue from_json_value(const ordered_json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error("report values must be numbers or strings");
}

}  // namespace

void ReportTable::add_row(std::vector<ReportValue> row) {
  if (row.size() != columns.size()) {
    throw Error("report row has " + std::to_string(row.size()) + " fields, expected " +
                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error("unknown report format '" + std::string(name) + "'");
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";  // "n" covers inf/nan
  return s;
}

void emit_report(const ReportTable& table, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::kJson) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : table.rows) {
      ordered_json obj = ordered_json::object();
      for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = to_json_value(row[c]);
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
    out << '\n';
  }
}

void emit_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open report file " + path.string());
  emit_report(table, format, out);
  if (!out) throw Error("failed writing report file " + path.string());
}

ReportTable parse_report(std::istream& in, ReportFormat format) {
  ReportTable table;
  if (format == ReportFormat::kJson) {
    const ordered_json arr = ordered_json::parse(in);
    if (!arr.is_array()) throw Error("JSON report must be an array");
    for (const auto& obj : arr) {
      if (!obj.is_object()) throw Error("JSON report rows must be objects");
      if (table.columns.empty()) {
        for (auto it = obj.begin(); it != obj.end(); ++it) table.columns.push_back(it.key());
      }
      std::vector<ReportValue> row;
      for (const auto& col : table.columns) {
        if (!obj.contains(col)) throw Error("JSON report row lacks column '" + col + "'");
        row.push_back(from_json_value(obj.at(col)));
      }
      table.add_row(std::move(row));
    }
    return table;
  }
  std::vector<std::pair<std::string, bool>> fields;
  if (!read_csv_record(in, fields)) return table;
  for (auto& [name, quoted] : fields) table.columns.push_back(name);
  if (table.columns.size() == 1 && table.columns[0].empty()) table.columns.clear();
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && fields[0].first.empty() && !fields[0].second) continue;
    std::vector<ReportValue> row;
    for (const auto& [text, quoted] : fields) row.push_back(parse_csv_value(text, quoted));
    table.add_row(std::move(row));
  }
  return table;
}

ReportTable parse_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report file " + path.string());
  return parse_report(in, format);
}

}  // namespace adaptgear
