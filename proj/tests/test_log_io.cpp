#include <gtest/gtest.h>

#include <sstream>

#include "chaosmine/error.hpp"
#include "chaosmine/log_io.hpp"
#include "support.hpp"

using namespace chaosmine;
using chaosmine::testing::data_path;
using chaosmine::testing::random_log;

namespace {

std::string xes_of(const std::vector<std::vector<std::string>>& traces) {
  std::string out = "<?xml version=\"1.0\"?>\n<log xes.version=\"1.0\">\n";
  for (const auto& trace : traces) {
    out += "  <trace>\n";
    for (const auto& e : trace) out += "    <event><string key=\"concept:name\" value=\"" + e + "\"/></event>\n";
    out += "  </trace>\n";
  }
  return out + "</log>\n";
}

}  // namespace

TEST(Xes, TranscribesTracesIntoVariants) {
  auto result = ingest_xes(xes_of({{"a", "b", "c"}, {"a", "b", "c"}, {"b", "a", "c"}}));
  EXPECT_EQ(result.log, parse_variants("2×a,b,c\n1×b,a,c\n"));
  EXPECT_EQ(result.dropped_traces, 0u);
}

TEST(Xes, DropsEmptyTraces) {
  auto result = ingest_xes(xes_of({{}, {"a"}}));
  EXPECT_EQ(result.log, parse_variants("1×a\n"));
  EXPECT_EQ(result.dropped_traces, 1u);
}

TEST(Xes, MalformedXmlReportsPosition) {
  try {
    ingest_xes("<log>\n<trace>\n<event></trace></log>");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(Xes, MissingNameIsAnErrorUnlessLenient) {
  const std::string xes =
      "<log><trace><event><string key=\"concept:name\" value=\"a\"/></event>"
      "<event><string key=\"org:resource\" value=\"r\"/></event></trace></log>";
  try {
    ingest_xes(xes);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("trace 0"), std::string::npos) << e.what();
  }
  XesOptions lenient;
  lenient.lenient = true;
  auto result = ingest_xes(xes, lenient);
  EXPECT_EQ(result.log, parse_variants("1×a\n"));
  EXPECT_EQ(result.skipped_events, 1u);
}

TEST(Xes, LifecycleFilterKeepsCompleteEvents) {
  const std::string xes =
      "<log><trace>"
      "<event><string key=\"concept:name\" value=\"a\"/><string key=\"lifecycle:transition\" value=\"start\"/></event>"
      "<event><string key=\"concept:name\" value=\"a\"/><string key=\"lifecycle:transition\" value=\"complete\"/></event>"
      "<event><string key=\"concept:name\" value=\"b\"/></event>"
      "</trace></log>";
  EXPECT_EQ(ingest_xes(xes).log, parse_variants("1×a,a,b\n"));
  XesOptions complete;
  complete.complete_only = true;
  auto result = ingest_xes(xes, complete);
  EXPECT_EQ(result.log, parse_variants("1×a,b\n"));
  EXPECT_EQ(result.skipped_events, 1u);
}

TEST(Xes, RoundTripPreservesVariantsAndNames) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto log = random_log(seed);
    EXPECT_EQ(ingest_xes(to_xes(log)).log, log);
  }
  auto odd = EventLog::from_named({{{"a & b", "<c>", "\"q\"", "ü"}, 3}});
  EXPECT_EQ(ingest_xes(to_xes(odd)).log, odd);
}

TEST(Xes, ReadsFromStream) {
  std::istringstream in(xes_of({{"a", "b"}}));
  EXPECT_EQ(ingest_xes(in).log, parse_variants("1×a,b\n"));
}

TEST(Xes, BundledFixtureHasTwelveActivitiesAndTwentyFiveTraces) {
  auto result = read_log_file(data_path("logs/a12_25.xes"));
  EXPECT_EQ(result.log.alphabet().size(), 12u);
  EXPECT_EQ(result.log.trace_count(), 25u);
  EXPECT_EQ(result.log, read_log_file(data_path("logs/a12_25.variants")).log);
}

TEST(Csv, GroupsRowsByCaseInFileOrder) {
  auto result = ingest_csv("case,activity\nc1,a\nc1,b\nc2,b\nc2,a\n");
  EXPECT_EQ(result.log, parse_variants("1×a,b\n1×b,a\n"));
}

TEST(Csv, OrderColumnSortsStably) {
  CsvOptions options;
  options.order_column = "order";
  auto result = ingest_csv("case,activity,order\nc1,a,2\nc1,b,1\nc2,b,1\nc2,a,2\n", options);
  EXPECT_EQ(result.log, parse_variants("2×b,a\n"));
}

TEST(Csv, EmptyBodyIsAnError) {
  try {
    ingest_csv("case,activity\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty log"), std::string::npos);
  }
}

TEST(Csv, MissingColumnIsNamed) {
  try {
    ingest_csv("id,activity\n1,a\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("case"), std::string::npos);
  }
}

TEST(Csv, BadOrderValueReportsRow) {
  CsvOptions options;
  options.order_column = "t";
  try {
    ingest_csv("case,activity,t\nc1,a,1\nc1,b,soon\n", options);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, QuotedFieldsAndCustomColumns) {
  CsvOptions options;
  options.case_column = "Case ID";
  options.activity_column = "Activity";
  auto result = ingest_csv("\"Case ID\",Activity\n1,\"x, y\"\n1,\"say \"\"hi\"\"\"\n", options);
  EXPECT_EQ(result.log, EventLog::from_named({{{"x, y", "say \"hi\""}, 1}}));
}

TEST(Variants, FormatParseRoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto log = random_log(seed);
    EXPECT_EQ(parse_variants(format_variants(log)), log);
  }
  auto odd = EventLog::from_named({{{"a,b", "c\\d"}, 2}});
  EXPECT_EQ(parse_variants(format_variants(odd)), odd);
}

TEST(Variants, AcceptsAsciiTimesAndComments) {
  EXPECT_EQ(parse_variants("# comment\n\n3xa,b\n"), parse_variants("3×a,b\n"));
}

TEST(Variants, BadLinesReportLine) {
  try {
    parse_variants("1×a\nfoo\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Csv, ParseCsvSkipsBlankLines) {
  auto rows = parse_csv("a,b\n\n\"1,2\",3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1,2", "3"}));
}
