#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "radmax/verification.hpp"

namespace radmax {

inline constexpr std::string_view kSchemaVersion = "radmax/1";

enum class OutputFormat { Table, Csv, Jsonl };

OutputFormat parse_output_format(std::string_view name);

/// Pre-rendered JSON object, emitted verbatim.
struct JsonObject {
  std::string text;
};

using FieldValue = std::variant<std::int64_t, double, bool, std::string, JsonObject>;
using Record = std::vector<std::pair<std::string, FieldValue>>;

/// Writes records in one of three layouts. Structured layouts (csv, jsonl)
/// print reals with 17 significant digits; tables round to 6 and are
/// aligned, so they are buffered until finish(). Non-finite reals become the
/// strings "inf", "-inf" and "nan".
class RecordWriter {
 public:
  RecordWriter(OutputFormat format, std::ostream& out);
  void write(const Record& record);
  void finish();

 private:
  OutputFormat format_;
  std::ostream& out_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_field(const FieldValue& value, OutputFormat format);

/// Record with the report's fields in declaration order, prefixed by the
/// schema version. worst_case is flattened into "worst_case.<key>" columns
/// for csv/table and a nested object for jsonl.
Record report_record(const VerificationReport& report, OutputFormat format);

}  // namespace radmax
