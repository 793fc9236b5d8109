#include "chaosmine/log_io.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "chaosmine/error.hpp"

namespace chaosmine {

namespace {

std::string_view local_name(std::string_view tag) {
  auto colon = tag.rfind(':');
  return colon == std::string_view::npos ? tag : tag.substr(colon + 1);
}

struct XesState {
  XesOptions options;
  LogBuilder builder;
  IngestResult counts;

  std::vector<std::string> stack;
  std::size_t trace_index = 0;
  std::size_t event_index = 0;

  std::vector<std::string> current_trace;
  std::optional<std::string> event_name;
  std::optional<std::string> event_lifecycle;

  std::optional<std::string> failure;
  XML_Parser parser = nullptr;

  bool in(std::initializer_list<std::string_view> path) const {
    if (stack.size() != path.size()) return false;
    return std::equal(stack.begin(), stack.end(), path.begin());
  }

  void fail(std::string message) {
    if (failure) return;
    failure = std::move(message);
    XML_StopParser(parser, XML_FALSE);
  }
};

void on_start(void* data, const XML_Char* raw_tag, const XML_Char** attrs) {
  auto& st = *static_cast<XesState*>(data);
  if (st.failure) return;
  std::string tag(local_name(raw_tag));

  if (tag == "trace" && st.in({"log"})) {
    st.current_trace.clear();
    st.event_index = 0;
  } else if (tag == "event" && st.in({"log", "trace"})) {
    st.event_name.reset();
    st.event_lifecycle.reset();
  } else if (st.in({"log", "trace", "event"})) {
    std::string_view key;
    std::string_view value;
    bool has_value = false;
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
      std::string_view attr = attrs[i];
      if (attr == "key") key = attrs[i + 1];
      if (attr == "value") {
        value = attrs[i + 1];
        has_value = true;
      }
    }
    if (tag == "string" && has_value) {
      if (key == "concept:name") st.event_name = std::string(value);
      if (key == "lifecycle:transition") st.event_lifecycle = std::string(value);
    }
  }
  st.stack.push_back(std::move(tag));
}

void on_end(void* data, const XML_Char* /*tag*/) {
  auto& st = *static_cast<XesState*>(data);
  if (st.failure) return;

  if (st.in({"log", "trace", "event"})) {
    const bool lifecycle_ok =
        !st.options.complete_only || !st.event_lifecycle || *st.event_lifecycle == "complete";
    if (!st.event_name || st.event_name->empty()) {
      if (!st.options.lenient) {
        st.fail("event " + std::to_string(st.event_index) + " of trace " +
                std::to_string(st.trace_index) + " has no concept:name");
        return;
      }
      ++st.counts.skipped_events;
    } else if (!lifecycle_ok) {
      ++st.counts.skipped_events;
    } else {
      st.current_trace.push_back(*st.event_name);
    }
    ++st.event_index;
  } else if (st.in({"log", "trace"})) {
    if (st.current_trace.empty()) {
      ++st.counts.dropped_traces;
    } else {
      try {
        st.builder.add_trace(st.current_trace);
      } catch (const Error& e) {
        st.fail("trace " + std::to_string(st.trace_index) + ": " + e.what());
        return;
      }
    }
    ++st.trace_index;
  }
  st.stack.pop_back();
}

class XesReader {
 public:
  explicit XesReader(const XesOptions& options) : parser_(XML_ParserCreate(nullptr)) {
    if (!parser_) throw Error("internal", "cannot allocate XML parser");
    state_.options = options;
    state_.parser = parser_.get();
    XML_SetUserData(parser_.get(), &state_);
    XML_SetElementHandler(parser_.get(), on_start, on_end);
  }

  void feed(const char* data, std::size_t size, bool final) {
    if (XML_Parse(parser_.get(), data, static_cast<int>(size), final ? XML_TRUE : XML_FALSE) ==
        XML_STATUS_ERROR) {
      const auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser_.get()));
      const auto column = static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser_.get())) + 1;
      if (state_.failure) throw ParseError(*state_.failure, line, column);
      throw ParseError(std::string("malformed XML: ") +
                           XML_ErrorString(XML_GetErrorCode(parser_.get())),
                       line, column);
    }
  }

  IngestResult finish() {
    IngestResult result = state_.counts;
    result.log = std::move(state_.builder).build();
    return result;
  }

 private:
  struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
  };
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser_;
  XesState state_;
};

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// RFC 4180 records; quoted fields may contain delimiters, quotes ("") and
// newlines. Returns rows with their 1-based starting line number.
std::vector<std::pair<std::size_t, std::vector<std::string>>> split_csv(std::string_view text,
                                                                      char delimiter) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.emplace_back(row_line, std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", line, 1);
  if (field_started || !row.empty()) end_row();
  return rows;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  for (auto& [line, row] : split_csv(text, delimiter)) rows.push_back(std::move(row));
  return rows;
}

IngestResult ingest_xes(std::string_view source, const XesOptions& options) {
  XesReader reader(options);
  reader.feed(source.data(), source.size(), true);
  return reader.finish();
}

IngestResult ingest_xes(std::istream& source, const XesOptions& options) {
  XesReader reader(options);
  std::vector<char> buffer(1 << 16);
  while (source) {
    source.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(source.gcount());
    reader.feed(buffer.data(), got, false);
  }
  reader.feed(buffer.data(), 0, true);
  return reader.finish();
}

void write_xes(const EventLog& log, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<log xes.version=\"1.0\" xes.features=\"nested-attributes\">\n"
      << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  std::uint64_t case_id = 0;
  for (const auto& [trace, count] : log.variants()) {
    for (std::uint64_t copy = 0; copy < count; ++copy) {
      out << "  <trace>\n    <string key=\"concept:name\" value=\"case_" << case_id++ << "\"/>\n";
      for (ActivityId a : trace) {
        out << "    <event><string key=\"concept:name\" value=\"" << xml_escape(log.name(a))
            << "\"/></event>\n";
      }
      out << "  </trace>\n";
    }
  }
  out << "</log>\n";
}

std::string to_xes(const EventLog& log) {
  std::ostringstream out;
  write_xes(log, out);
  return out.str();
}

IngestResult ingest_csv(std::string_view source, const CsvOptions& options) {
  auto rows = split_csv(source, options.delimiter);
  if (rows.empty()) throw InvalidArgument("CSV input has no header row");
  const auto& header = rows.front().second;
  auto column = [&header](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t case_col = column(options.case_column);
  const std::size_t act_col = column(options.activity_column);
  std::optional<std::size_t> order_col;
  if (options.order_column) order_col = column(*options.order_column);
  if (rows.size() == 1) throw InvalidArgument("empty log");

  struct Row {
    double order;
    std::string activity;
  };
  std::vector<std::string> case_order;
  std::unordered_map<std::string, std::vector<Row>> cases;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, fields] = rows[r];
    const std::size_t needed = std::max({case_col, act_col, order_col.value_or(0)}) + 1;
    if (fields.size() < needed) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(fields.size()) +
                           " fields, expected at least " + std::to_string(needed),
                       line, 1);
    }
    double order = static_cast<double>(r);
    if (order_col) {
      const std::string& raw = fields[*order_col];
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), order);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ParseError("row " + std::to_string(r) + ": unparsable order value '" + raw + "'",
                         line, *order_col + 1);
      }
    }
    auto [it, inserted] = cases.try_emplace(fields[case_col]);
    if (inserted) case_order.push_back(fields[case_col]);
    it->second.push_back({order, fields[act_col]});
  }

  LogBuilder builder;
  for (const auto& id : case_order) {
    auto& events = cases[id];
    if (order_col) {
      std::stable_sort(events.begin(), events.end(),
                       [](const Row& l, const Row& r) { return l.order < r.order; });
    }
    std::vector<std::string> names;
    for (auto& e : events) names.push_back(std::move(e.activity));
    builder.add_trace(names);
  }
  IngestResult result;
  result.log = std::move(builder).build();
  return result;
}

EventLog parse_variants(std::string_view text) {
  LogBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), count);
    if (ec != std::errc() || ptr == line.data()) throw ParseError("expected a count", line_no, 1);
    std::size_t at = static_cast<std::size_t>(ptr - line.data());
    std::string_view rest = line.substr(at);
    if (rest.starts_with("×")) {
      at += std::string_view("×").size();
    } else if (rest.starts_with("x")) {
      at += 1;
    } else {
      throw ParseError("expected '×' after the count", line_no, at + 1);
    }
    if (count == 0) throw ParseError("multiplicity must be positive", line_no, 1);

    std::vector<std::string> names(1);
    for (std::size_t i = at; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '\\' && i + 1 < line.size()) {
        names.back() += line[++i];
      } else if (c == ',') {
        names.emplace_back();
      } else {
        names.back() += c;
      }
    }
    for (const auto& n : names) {
      if (n.empty()) throw ParseError("empty activity name", line_no, at + 1);
    }
    try {
      builder.add_trace(names, count);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no, 1);
    }
    if (nl == text.size()) break;
  }
  return std::move(builder).build();
}

std::string format_variants(const EventLog& log) {
  std::string out;
  for (const auto& [trace, count] : log.variants()) {
    out += std::to_string(count);
    out += "×";
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i > 0) out += ',';
      for (char c : log.name(trace[i])) {
        if (c == ',' || c == '\\') out += '\\';
        out += c;
      }
    }
    out += '\n';
  }
  return out;
}

LogFormat format_for_path(std::string_view path) {
  auto ends_with = [&path](std::string_view suffix) {
    if (path.size() < suffix.size()) return false;
    auto tail = path.substr(path.size() - suffix.size());
    return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) {
      return std::tolower(static_cast<unsigned char>(a)) == b;
    });
  };
  if (ends_with(".xes")) return LogFormat::xes;
  if (ends_with(".csv")) return LogFormat::csv;
  return LogFormat::variants;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("io_error", "write failed for '" + path + "'");
}

IngestResult read_log_file(const std::string& path, const CsvOptions& csv, const XesOptions& xes) {
  switch (format_for_path(path)) {
    case LogFormat::xes: {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error("io_error", "cannot open '" + path + "'");
      return ingest_xes(in, xes);
    }
    case LogFormat::csv:
      return ingest_csv(read_file(path), csv);
    case LogFormat::variants:
      break;
  }
  IngestResult result;
  result.log = parse_variants(read_file(path));
  return result;
}

}  // namespace chaosmine
