#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radmax/report.hpp"

using namespace radmax;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

VerificationReport sample_report() {
  VerificationReport r;
  r.battery = "lemma";
  r.trials = 12;
  r.worst_margin = -2.5e-15;
  r.worst_case = {{"d", 3.0}, {"a", 1.0 / 3.0}};
  r.tolerance = 1e-9;
  r.seed = 7;
  r.passed = true;
  return r;
}

}  // namespace

TEST_CASE("format names") {
  CHECK(parse_output_format("table") == OutputFormat::Table);
  CHECK(parse_output_format("csv") == OutputFormat::Csv);
  CHECK(parse_output_format("jsonl") == OutputFormat::Jsonl);
  CHECK_THROWS_AS(parse_output_format("xml"), std::invalid_argument);
}

TEST_CASE("real formatting") {
  const double third = 1.0 / 3.0;
  CHECK(format_field(third, OutputFormat::Table) == "0.333333");
  const std::string full = format_field(third, OutputFormat::Csv);
  CHECK(full == "0.33333333333333331");
  CHECK(std::stod(full) == third);
  CHECK(format_field(std::numeric_limits<double>::infinity(), OutputFormat::Csv) == "inf");
  CHECK(format_field(-std::numeric_limits<double>::infinity(), OutputFormat::Table) == "-inf");
  CHECK(format_field(std::nan(""), OutputFormat::Jsonl) == "nan");
  CHECK(format_field(true, OutputFormat::Csv) == "true");
  CHECK(format_field(std::int64_t{-4}, OutputFormat::Csv) == "-4");
}

TEST_CASE("17 digits round-trip through jsonl") {
  std::ostringstream os;
  RecordWriter w(OutputFormat::Jsonl, os);
  const double x = 0.1 + 0.2;
  w.write({{"x", x}, {"name", std::string("a\"b")}, {"n", std::int64_t{3}}, {"ok", false}});
  w.finish();
  const auto j = nlohmann::json::parse(lines_of(os.str()).at(0));
  CHECK(j["x"].get<double>() == x);
  CHECK(j["name"] == "a\"b");
  CHECK(j["n"] == 3);
  CHECK(j["ok"] == false);
}

TEST_CASE("jsonl keeps field order and quotes non-finite values") {
  std::ostringstream os;
  RecordWriter w(OutputFormat::Jsonl, os);
  w.write({{"z", 1.0}, {"a", std::numeric_limits<double>::infinity()}, {"m", std::nan("")}});
  const std::string line = lines_of(os.str()).at(0);
  CHECK(line.find("\"z\"") < line.find("\"a\""));
  CHECK(line.find("\"a\"") < line.find("\"m\""));
  const auto j = nlohmann::json::parse(line);
  CHECK(j["a"] == "inf");
  CHECK(j["m"] == "nan");
}

TEST_CASE("csv header is re-emitted when the keys change") {
  std::ostringstream os;
  RecordWriter w(OutputFormat::Csv, os);
  w.write({{"a", 1.0}, {"b", std::string("x,y")}});
  w.write({{"a", 2.0}, {"b", std::string("z")}});
  w.write({{"c", std::int64_t{5}}});
  w.finish();
  const auto l = lines_of(os.str());
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "a,b");
  CHECK(l[1] == "1,\"x,y\"");
  CHECK(l[2] == "2,z");
  CHECK(l[3] == "c");
  CHECK(l[4] == "5");
}

TEST_CASE("table columns are aligned") {
  std::ostringstream os;
  RecordWriter w(OutputFormat::Table, os);
  w.write({{"p", 2.0}, {"value", 1.0 / 3.0}});
  w.write({{"p", 1.25}, {"value", 10.0}});
  CHECK(os.str().empty());  // buffered
  w.finish();
  const auto l = lines_of(os.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "p     value");
  CHECK(l[1] == "2     0.333333");
  CHECK(l[2] == "1.25  10");
}

TEST_CASE("report records") {
  const auto r = sample_report();
  const auto flat = report_record(r, OutputFormat::Csv);
  std::vector<std::string> keys;
  for (const auto& kv : flat) keys.push_back(kv.first);
  CHECK(keys == std::vector<std::string>{"schema", "battery", "trials", "worst_margin",
                                         "worst_case.d", "worst_case.a", "tolerance", "seed",
                                         "passed"});

  std::ostringstream os;
  RecordWriter w(OutputFormat::Jsonl, os);
  w.write(report_record(r, OutputFormat::Jsonl));
  const auto j = nlohmann::json::parse(lines_of(os.str()).at(0));
  CHECK(j["schema"] == std::string(kSchemaVersion));
  CHECK(j["battery"] == "lemma");
  CHECK(j["trials"] == 12);
  CHECK(j["worst_margin"].get<double>() == -2.5e-15);
  CHECK(j["worst_case"]["d"] == 3.0);
  CHECK(j["worst_case"]["a"].get<double>() == 1.0 / 3.0);
  CHECK(j["seed"] == 7);
  CHECK(j["passed"] == true);
}
