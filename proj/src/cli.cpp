#include "chaosmine/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <csignal>
#include <fstream>
#include <sstream>

#include "chaosmine/discovery.hpp"
#include "chaosmine/entropy.hpp"
#include "chaosmine/error.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/serialization.hpp"
#include "chaosmine/service.hpp"
#include "chaosmine/synthesis.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

struct InputOptions {
  std::string path;
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string order_column;
  bool lenient = false;
  bool complete_only = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("input", path, "Event log (.xes, .csv or variant listing)")->required();
    cmd->add_option("--case-column", case_column, "CSV case id column");
    cmd->add_option("--activity-column", activity_column, "CSV activity column");
    cmd->add_option("--order-column", order_column, "CSV numeric ordering column");
    cmd->add_flag("--lenient", lenient, "XES: skip events without a name");
    cmd->add_flag("--complete-only", complete_only, "XES: keep only lifecycle 'complete' events");
  }

  IngestResult read() const {
    CsvOptions csv;
    csv.case_column = case_column;
    csv.activity_column = activity_column;
    if (!order_column.empty()) csv.order_column = order_column;
    XesOptions xes;
    xes.lenient = lenient;
    xes.complete_only = complete_only;
    return read_log_file(path, csv, xes);
  }
};

struct MethodOptions {
  std::string method;
  bool laplace = false;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "direct-entropy, indirect-entropy, least-frequent-first, "
                                        "most-frequent-first or random (optionally with -laplace)")
        ->required();
    cmd->add_flag("--laplace", laplace, "Adaptive Laplace smoothing (entropy methods)");
    cmd->add_option("--seed", seed, "Seed (required for random)");
  }

  FilterMethod resolve() const {
    FilterMethod m = parse_filter_method(method, seed);
    if (laplace) m.laplace = true;
    m.validate();
    return m;
  }
};

std::string log_as_csv(const EventLog& log) {
  std::ostringstream out;
  out << "case,activity\n";
  std::uint64_t case_id = 0;
  for (const auto& [trace, count] : log.variants()) {
    for (std::uint64_t i = 0; i < count; ++i) {
      ++case_id;
      for (ActivityId a : trace) out << 'c' << case_id << ',' << csv_field(log.name(a)) << '\n';
    }
  }
  return out.str();
}

std::string render_log(const EventLog& log, const std::string& path) {
  switch (format_for_path(path)) {
    case LogFormat::xes: return to_xes(log);
    case LogFormat::csv: return log_as_csv(log);
    case LogFormat::variants: return format_variants(log);
  }
  return format_variants(log);
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  for (const auto& part : split(text, ',')) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size() || value == 0) {
      throw InvalidArgument("--k expects positive integers, got '" + part + "'");
    }
    ks.push_back(value);
  }
  return ks;
}

std::vector<ChaosMode> parse_modes(const std::string& text) {
  std::vector<ChaosMode> modes;
  for (const auto& part : split(text, ',')) modes.push_back(parse_chaos_mode(part));
  return modes;
}

std::vector<FilterMethod> parse_methods(const std::string& text, std::uint64_t seed) {
  if (text == "all") return all_methods(seed);
  if (text == "deterministic") return deterministic_methods();
  std::vector<FilterMethod> methods;
  for (const auto& part : split(text, ',')) {
    methods.push_back(parse_filter_method(part, part == "random" ? std::optional<std::uint64_t>(seed) : std::nullopt));
  }
  return methods;
}

struct ScheduleFile {
  std::string name;
  std::string method;
  std::vector<std::string> ranking;
};

// Reads the CSV written by `rank`.
ScheduleFile read_schedule_csv(const std::string& path) {
  const auto rows = parse_csv(read_file(path));
  if (rows.empty() || rows[0].size() < 4 || rows[0][0] != "step" || rows[0][1] != "activity") {
    throw InvalidArgument(path + ": not a schedule CSV (expected header step,activity,criterion,method,alpha)");
  }
  ScheduleFile file{path, "", {}};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 4) throw ParseError(path + ": short schedule row", i + 1, 1);
    file.ranking.push_back(rows[i][1]);
    file.method = rows[i][3];
  }
  return file;
}

// CSV with header "method,<log>,<log>,..."; empty cells are missing values.
RankMatrix read_matrix_csv(const std::string& path) {
  const auto rows = parse_csv(read_file(path));
  if (rows.empty() || rows[0].size() < 2) throw InvalidArgument(path + ": matrix needs a header row");
  RankMatrix matrix;
  matrix.logs.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != rows[0].size()) throw ParseError(path + ": row width differs from header", i + 1, 1);
    matrix.methods.push_back(row[0]);
    std::vector<std::optional<double>> values;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j].empty()) {
        values.emplace_back();
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(row[j].data(), row[j].data() + row[j].size(), v);
      if (ec != std::errc() || ptr != row[j].data() + row[j].size()) {
        throw ParseError(path + ": not a number '" + row[j] + "'", i + 1, j + 1);
      }
      values.emplace_back(v);
    }
    matrix.values.push_back(std::move(values));
  }
  return matrix;
}

std::string number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

HttpServer* active_server = nullptr;

void stop_server(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chaotic activity filtering for event logs", "chaosmine"};
  app.require_subcommand(1);

  std::string out_path;
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out,-o", out_path, "Output file (default stdout)"); };

  InputOptions input;
  MethodOptions method;

  auto* ingest = app.add_subcommand("ingest", "Read a log and write it in canonical form");
  input.attach(ingest);
  add_out(ingest);

  auto* rank = app.add_subcommand("rank", "Rank activities by a filter method");
  input.attach(rank);
  method.attach(rank);
  bool entropy_only = false;
  rank->add_flag("--entropy-report", entropy_only, "Print per-activity entropies of the unfiltered log instead");
  add_out(rank);

  auto* filter = app.add_subcommand("filter", "Remove the first N ranked activities");
  input.attach(filter);
  method.attach(filter);
  std::size_t steps = 0;
  filter->add_option("--steps", steps, "Number of activities to remove")->required();
  add_out(filter);

  auto* generate = app.add_subcommand("generate", "Simulate a log from a process tree");
  std::string tree_file;
  std::string tree_text;
  std::size_t traces = 0;
  std::uint64_t seed = 0;
  double loop_p = 0.5;
  auto* tree_opt = generate->add_option("--tree", tree_file, "Process tree file");
  generate->add_option("--tree-text", tree_text, "Process tree expression")->excludes(tree_opt);
  generate->add_option("--traces", traces, "Number of traces")->required();
  generate->add_option("--seed", seed, "Random seed")->required();
  generate->add_option("--loop-p", loop_p, "Probability of repeating a loop");
  add_out(generate);

  auto* inject = app.add_subcommand("inject", "Insert chaotic activities into a log");
  input.attach(inject);
  std::size_t k = 1;
  std::string mode = "U";
  std::string prefix = "CHAOS_";
  std::string truth_out;
  inject->add_option("--k", k, "Number of chaotic activities")->required();
  inject->add_option("--mode", mode, "U (uniform), F (frequent) or I (infrequent)");
  inject->add_option("--seed", seed, "Random seed")->required();
  inject->add_option("--prefix", prefix, "Name prefix of inserted activities");
  inject->add_option("--truth-out", truth_out, "Write the inserted activity names here");
  add_out(inject);

  auto* evaluate = app.add_subcommand("evaluate-chaos", "Incorrect removals per method, k and insertion mode");
  input.attach(evaluate);
  std::string ks_text = "1,2,4,8";
  std::string modes_text = "U,F,I";
  std::string methods_text = "all";
  evaluate->add_option("--k", ks_text, "Comma-separated numbers of chaotic activities");
  evaluate->add_option("--modes", modes_text, "Comma-separated insertion modes");
  evaluate->add_option("--methods", methods_text, "all, deterministic or comma-separated labels");
  evaluate->add_option("--seed", seed, "Random seed")->required();
  add_out(evaluate);

  auto* discover_cmd = app.add_subcommand("discover", "Discover a process tree and report its quality");
  input.attach(discover_cmd);
  double edge_filter = 0.0;
  bool as_json = false;
  bool metrics = false;
  bool pooled = false;
  discover_cmd->add_option("--edge-filter", edge_filter, "Relative edge filtering threshold in [0, 1)");
  discover_cmd->add_flag("--json", as_json, "Print the full JSON document");
  discover_cmd->add_flag("--metrics", metrics, "Append nondeterminism and fitness as CSV");
  discover_cmd->add_flag("--pooled", pooled, "Pool visible steps instead of averaging per trace");
  add_out(discover_cmd);

  auto* curve = app.add_subcommand("curve", "Quality after each removal step");
  input.attach(curve);
  method.attach(curve);
  curve->add_option("--edge-filter", edge_filter, "Relative edge filtering threshold in [0, 1)");
  curve->add_flag("--pooled", pooled, "Pool visible steps instead of averaging per trace");
  add_out(curve);

  auto* compare = app.add_subcommand("compare", "Rank correlation between schedules, winning numbers of a matrix");
  std::vector<std::string> schedule_files;
  std::string matrix_file;
  compare->add_option("schedules", schedule_files, "Schedule CSV files written by rank");
  compare->add_option("--matrix", matrix_file, "Method x log CSV of metric values (lower is better)");
  add_out(compare);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  ServiceConfig service_config;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> store;
  std::optional<std::size_t> upload_limit;
  serve->add_option("--host", host, "Listen address (CHAOSMINE_HOST)");
  serve->add_option("--port", port, "Listen port (CHAOSMINE_PORT)");
  serve->add_option("--store", store, "Session store directory (CHAOSMINE_STORE)");
  serve->add_option("--upload-limit", upload_limit, "Upload limit in bytes (CHAOSMINE_UPLOAD_LIMIT)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return 2;
  }

  try {
    if (ingest->parsed()) {
      const IngestResult result = input.read();
      std::ostringstream summary;
      summary << "traces=" << result.log.trace_count() << " variants=" << result.log.variant_count()
              << " activities=" << result.log.activities().size() << " events=" << result.log.event_count()
              << " dropped_traces=" << result.dropped_traces << " skipped_events=" << result.skipped_events << "\n";
      if (out_path.empty()) {
        out << format_variants(result.log);
        err << summary.str();
      } else {
        write_file(out_path, render_log(result.log, out_path));
        out << summary.str();
      }
    } else if (rank->parsed()) {
      const EventLog log = input.read().log;
      const FilterMethod m = method.resolve();
      if (entropy_only) {
        const bool smoothed = m.laplace;
        const double alpha = smoothed ? adaptive_alpha(build_follow_stats(log)) : 0.0;
        emit(to_csv(entropy_report(log, alpha)), out_path, out);
      } else {
        emit(to_csv(run_filter(log, m)), out_path, out);
      }
    } else if (filter->parsed()) {
      const EventLog log = input.read().log;
      const FilterSchedule schedule = run_filter(log, method.resolve());
      const EventLog filtered = materialize(log, schedule, steps);
      emit(render_log(filtered, out_path), out_path, out);
    } else if (generate->parsed()) {
      if (tree_file.empty() && tree_text.empty()) throw InvalidArgument("give --tree or --tree-text");
      const ProcessTree tree = parse_tree(tree_file.empty() ? tree_text : read_file(tree_file));
      emit(render_log(simulate(tree, traces, seed, loop_p), out_path), out_path, out);
    } else if (inject->parsed()) {
      const EventLog log = input.read().log;
      ChaosInsertionSpec spec{k, parse_chaos_mode(mode), seed, prefix};
      const ChaosInjection injection = inject_chaos(log, spec);
      emit(render_log(injection.log, out_path), out_path, out);
      std::string truth;
      for (const auto& [name, count] : injection.inserted) truth += name + "," + std::to_string(count) + "\n";
      if (!truth_out.empty()) {
        write_file(truth_out, "activity,events\n" + truth);
      } else {
        err << "inserted:";
        for (const auto& [name, count] : injection.inserted) err << ' ' << name << '=' << count;
        err << "\n";
      }
    } else if (evaluate->parsed()) {
      const EventLog log = input.read().log;
      ChaosGridOptions options;
      options.ks = parse_ks(ks_text);
      options.modes = parse_modes(modes_text);
      options.methods = parse_methods(methods_text, seed);
      options.seed = seed;
      emit(chaos_grid_csv(evaluate_chaos_grid(log, options), options), out_path, out);
    } else if (discover_cmd->parsed()) {
      const EventLog log = input.read().log;
      DiscoveryConfig config{edge_filter};
      const ModelQuality quality = evaluate_model(log, config, pooled ? Averaging::pooled : Averaging::per_trace);
      std::string text;
      if (as_json) {
        Json doc{{"process_tree", tree_to_json(quality.tree)},
                 {"process_tree_text", format_tree(quality.tree)},
                 {"dfg", dfg_to_json(build_dfg(log), log)},
                 {"fitness_fraction", quality.replay.fitness_fraction},
                 {"flower_baseline", quality.flower_baseline}};
        doc["nondeterminism"] =
            quality.replay.nondeterminism ? Json(*quality.replay.nondeterminism) : Json(nullptr);
        text = doc.dump(2) + "\n";
      } else {
        text = format_tree(quality.tree) + "\n";
        if (metrics) {
          text += "nondeterminism,fitness_fraction,flower_baseline\n";
          text += (quality.replay.nondeterminism ? number(*quality.replay.nondeterminism) : "") + "," +
                  number(quality.replay.fitness_fraction) + "," + number(quality.flower_baseline) + "\n";
        }
      }
      emit(text, out_path, out);
    } else if (curve->parsed()) {
      const EventLog log = input.read().log;
      const FilterSchedule schedule = run_filter(log, method.resolve());
      const auto records = explained_activity_curve(log, schedule, DiscoveryConfig{edge_filter},
                                                    pooled ? Averaging::pooled : Averaging::per_trace, input.path);
      emit(to_csv(records), out_path, out);
    } else if (compare->parsed()) {
      if (schedule_files.empty() && matrix_file.empty()) throw InvalidArgument("give schedule files or --matrix");
      std::ostringstream text;
      if (!schedule_files.empty()) {
        std::vector<ScheduleFile> files;
        for (const auto& path : schedule_files) files.push_back(read_schedule_csv(path));
        text << "left,right,tau_b,z,p,reject\n";
        for (std::size_t i = 0; i < files.size(); ++i) {
          for (std::size_t j = i + 1; j < files.size(); ++j) {
            const KendallResult r = kendall_tau_b(files[i].ranking, files[j].ranking);
            text << csv_field(files[i].name) << ',' << csv_field(files[j].name) << ','
                 << (r.tau_b ? number(*r.tau_b) : "") << ',' << (r.z ? number(*r.z) : "") << ','
                 << (r.p ? number(*r.p) : "") << ',' << (r.reject ? "true" : "false") << '\n';
          }
        }
      }
      if (!matrix_file.empty()) {
        const WinningNumbers wins = winning_number(read_matrix_csv(matrix_file));
        if (!schedule_files.empty()) text << '\n';
        text << "method,wins,average\n";
        for (std::size_t i = 0; i < wins.methods.size(); ++i) {
          text << csv_field(wins.methods[i]) << ',' << wins.totals[i] << ',' << number(wins.averages[i]) << '\n';
        }
      }
      emit(text.str(), out_path, out);
    } else if (serve->parsed()) {
      service_config = ServiceConfig::from_environment();
      if (host) service_config.host = *host;
      if (port) service_config.port = static_cast<std::uint16_t>(*port);
      if (store) service_config.store_directory = *store;
      if (upload_limit) service_config.upload_limit = *upload_limit;
      Service service(service_config);
      HttpServer server(service);
      const int bound = server.bind(service_config.host, service_config.port);
      out << "listening on " << service_config.host << ":" << bound << std::endl;
      active_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      server.listen();
      active_server = nullptr;
    }
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace chaosmine
