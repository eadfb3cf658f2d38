#include "radmax/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace radmax {

namespace {

std::string format_real(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.{}g}", v, digits);
}

std::string json_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<int>(c));
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_value(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (!std::isfinite(*d)) return "\"" + format_real(*d, 17) + "\"";
    return format_real(*d, 17);
  }
  if (const auto* s = std::get_if<std::string>(&v)) {
    return "\"" + json_escape(*s) + "\"";
  }
  return format_field(v, OutputFormat::Jsonl);
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "jsonl") return OutputFormat::Jsonl;
  throw std::invalid_argument("unknown output format: " + std::string(name));
}

std::string format_field(const FieldValue& value, OutputFormat format) {
  const int digits = format == OutputFormat::Table ? 6 : 17;
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_real(v, digits);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, JsonObject>) {
          return v.text;
        } else {
          return std::to_string(v);
        }
      },
      value);
}

RecordWriter::RecordWriter(OutputFormat format, std::ostream& out) : format_(format), out_(out) {}

void RecordWriter::write(const Record& record) {
  if (format_ == OutputFormat::Jsonl) {
    std::string line = "{";
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i) line += ",";
      line += "\"" + json_escape(record[i].first) + "\":" + json_value(record[i].second);
    }
    out_ << line << "}\n";
    return;
  }
  std::vector<std::string> keys, cells;
  for (const auto& [k, v] : record) {
    keys.push_back(k);
    cells.push_back(format_field(v, format_));
  }
  if (format_ == OutputFormat::Csv) {
    if (keys != header_) {
      header_ = keys;
      std::string line;
      for (std::size_t i = 0; i < keys.size(); ++i) line += (i ? "," : "") + csv_escape(keys[i]);
      out_ << line << "\n";
    }
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_escape(cells[i]);
    out_ << line << "\n";
    return;
  }
  if (keys != header_) {
    finish();
    header_ = keys;
  }
  rows_.push_back(std::move(cells));
}

void RecordWriter::finish() {
  if (format_ != OutputFormat::Table || rows_.empty()) {
    out_.flush();
    return;
  }
  std::vector<std::size_t> width(header_.size(), 0);
  for (std::size_t i = 0; i < header_.size(); ++i) width[i] = header_[i].size();
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  }
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      line += fmt::format("{:<{}}", row[i], width[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out_ << line << "\n";
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  rows_.clear();
  header_.clear();
  out_.flush();
}

Record report_record(const VerificationReport& report, OutputFormat format) {
  Record r;
  r.emplace_back("schema", std::string(kSchemaVersion));
  r.emplace_back("battery", report.battery);
  r.emplace_back("trials", static_cast<std::int64_t>(report.trials));
  r.emplace_back("worst_margin", report.worst_margin);
  if (format != OutputFormat::Jsonl) {
    for (const auto& [k, v] : report.worst_case) r.emplace_back("worst_case." + k, v);
  } else {
    std::string nested = "{";
    for (std::size_t i = 0; i < report.worst_case.size(); ++i) {
      const auto& [k, v] = report.worst_case[i];
      if (i) nested += ",";
      nested += "\"" + json_escape(k) + "\":" + json_value(v);
    }
    nested += "}";
    r.emplace_back("worst_case", JsonObject{nested});
  }
  r.emplace_back("tolerance", report.tolerance);
  r.emplace_back("seed", static_cast<std::int64_t>(report.seed));
  r.emplace_back("passed", report.passed);
  return r;
}

}  // namespace radmax
