#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaosmine/event_log.hpp"

namespace chaosmine {

struct XesOptions {
  // Skip events without "concept:name" instead of failing.
  bool lenient = false;
  // Keep only events whose lifecycle:transition is "complete". Events without
  // a lifecycle attribute are kept.
  bool complete_only = false;
};

struct IngestResult {
  EventLog log;
  std::uint64_t dropped_traces = 0;  // traces with zero readable events
  std::uint64_t skipped_events = 0;  // lenient mode and lifecycle filtering
};

IngestResult ingest_xes(std::string_view source, const XesOptions& options = {});
IngestResult ingest_xes(std::istream& source, const XesOptions& options = {});

// Writes one trace element per trace (variants expanded by multiplicity).
void write_xes(const EventLog& log, std::ostream& out);
std::string to_xes(const EventLog& log);

struct CsvOptions {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::optional<std::string> order_column;
  char delimiter = ',';
};

// RFC 4180 records, blank lines skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, char delimiter = ',');

IngestResult ingest_csv(std::string_view source, const CsvOptions& options = {});

// Canonical variant listing: one "count×a,b,c" line per variant. Commas and
// backslashes inside names are escaped with a backslash. Lines starting with
// '#' and blank lines are ignored on input; a plain 'x' is accepted in place
// of '×'.
EventLog parse_variants(std::string_view text);
std::string format_variants(const EventLog& log);

enum class LogFormat { xes, csv, variants };

// Chooses a format from the file extension (.xes, .csv, anything else is the
// variant listing).
LogFormat format_for_path(std::string_view path);

IngestResult read_log_file(const std::string& path, const CsvOptions& csv = {},
                           const XesOptions& xes = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace chaosmine
