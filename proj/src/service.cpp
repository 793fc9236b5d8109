#include "chaosmine/service.hpp"

#include <charconv>
#include <cstdlib>

#include "chaosmine/entropy.hpp"
#include "chaosmine/error.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

class HttpError : public Error {
 public:
  HttpError(int status, std::string code, const std::string& message, std::string field = "")
      : Error(std::move(code), message), status_(status), field_(std::move(field)) {}
  int status() const { return status_; }
  const std::string& field() const { return field_; }

 private:
  int status_;
  std::string field_;
};

Response error_response(int status, const std::string& code, const std::string& message,
                        const std::string& field = "") {
  Json error{{"code", code}, {"message", message}};
  if (!field.empty()) error["field"] = field;
  return {status, {{"error", std::move(error)}}};
}

[[noreturn]] void not_found(const std::string& id) {
  throw HttpError(404, "not_found", "unknown session '" + id + "'");
}

std::optional<std::uint64_t> parse_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

bool parse_flag(const std::map<std::string, std::string>& query, const std::string& name) {
  auto it = query.find(name);
  if (it == query.end()) return false;
  const auto& v = it->second;
  if (v.empty() || v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw HttpError(400, "invalid_argument", "expected a boolean for '" + name + "'", name);
}

FilterMethod method_from_query(const std::map<std::string, std::string>& query) {
  auto it = query.find("method");
  if (it == query.end() || it->second.empty()) {
    throw HttpError(400, "invalid_argument", "query parameter 'method' is required", "method");
  }
  std::optional<std::uint64_t> seed;
  if (auto s = query.find("seed"); s != query.end()) {
    seed = parse_unsigned(s->second);
    if (!seed) throw HttpError(400, "invalid_argument", "seed must be a non-negative integer", "seed");
  }
  try {
    FilterMethod method = parse_filter_method(it->second, seed);
    if (parse_flag(query, "laplace")) method.laplace = true;
    method.validate();
    return method;
  } catch (const HttpError&) {
    throw;
  } catch (const Error& e) {
    throw HttpError(400, e.code(), e.what(), "method");
  }
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw HttpError(400, "parse_error", std::string("request body is not valid JSON: ") + e.what(), "body");
  }
}

std::shared_ptr<SessionSlot> require(SessionStore& store, const std::string& id) {
  auto slot = store.find(id);
  if (!slot) not_found(id);
  return slot;
}

std::string media_type(const std::string& content_type) {
  std::string type = content_type.substr(0, content_type.find(';'));
  while (!type.empty() && type.back() == ' ') type.pop_back();
  for (char& c : type) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return type;
}

Json ranking_document(const EventLog& log, const FilterSchedule& schedule, const std::set<std::string>& disabled) {
  const auto counts = log.activity_counts();
  std::map<std::string, double> entropy;
  if (schedule.method.kind == FilterKind::direct_entropy || schedule.method.kind == FilterKind::indirect_entropy) {
    const auto stats = build_follow_stats(log);
    const double alpha = schedule.method.laplace ? adaptive_alpha(stats) : 0.0;
    for (ActivityId a : log.activities()) entropy[log.name(a)] = activity_entropy(stats, a, alpha);
  }
  Json rows = Json::array();
  auto add = [&](const ScheduleStep& step, bool retained) {
    Json row{{"rank", rows.size() + 1},
             {"activity", step.activity},
             {"criterion", step.criterion},
             {"alpha", step.alpha},
             {"frequency", counts[log.id(step.activity)]},
             {"retained", retained},
             {"disabled", disabled.contains(step.activity)}};
    row["step"] = retained ? Json(nullptr) : Json(rows.size() + 1);
    row["entropy"] = entropy.contains(step.activity) ? Json(entropy[step.activity]) : Json(nullptr);
    rows.push_back(std::move(row));
  };
  for (const auto& step : schedule.removal_order) add(step, false);
  for (const auto& step : schedule.retained) add(step, true);
  return {{"status", "done"},
          {"method", schedule.method.label()},
          {"source_digest", schedule.source_digest},
          {"diagnostic", schedule.diagnostic},
          {"rows", std::move(rows)}};
}

}  // namespace

ServiceConfig ServiceConfig::from_environment() {
  ServiceConfig config;
  if (const char* host = std::getenv("CHAOSMINE_HOST"); host && *host) config.host = host;
  if (const char* port = std::getenv("CHAOSMINE_PORT"); port && *port) {
    auto value = parse_unsigned(port);
    if (!value || *value > 65535) throw InvalidArgument("CHAOSMINE_PORT must be a port number");
    config.port = static_cast<std::uint16_t>(*value);
  }
  if (const char* store = std::getenv("CHAOSMINE_STORE"); store && *store) config.store_directory = store;
  if (const char* limit = std::getenv("CHAOSMINE_UPLOAD_LIMIT"); limit && *limit) {
    auto value = parse_unsigned(limit);
    if (!value || *value == 0) throw InvalidArgument("CHAOSMINE_UPLOAD_LIMIT must be a positive byte count");
    config.upload_limit = static_cast<std::size_t>(*value);
  }
  return config;
}

Service::Service(ServiceConfig config) : config_(std::move(config)), store_(config_.store_directory) {}

Service::~Service() {
  std::map<std::string, Job> pending;
  {
    std::lock_guard lock(jobs_mutex_);
    pending.swap(jobs_);
  }
  for (auto& [key, job] : pending) job.wait();
}

Response Service::handle(const Request& request) {
  try {
    const auto parts = split(request.path, '/');
    std::vector<std::string> segments;
    for (const auto& part : parts) {
      if (!part.empty()) segments.push_back(part);
    }
    const auto& m = request.method;
    if (segments.size() == 1 && segments[0] == "health" && m == "GET") return {200, {{"status", "ok"}}};
    if (segments.size() == 1 && segments[0] == "logs" && m == "POST") {
      return upload_log(request.body, request.content_type, request.query);
    }
    if (!segments.empty() && segments[0] == "sessions") {
      if (segments.size() == 2) {
        if (m == "GET") return get_session(segments[1]);
        if (m == "DELETE") return delete_session(segments[1]);
      } else if (segments.size() == 3) {
        const auto& id = segments[1];
        const auto& what = segments[2];
        if (what == "ranking" && m == "GET") return ranking(id, request.query);
        if (what == "toggles" && m == "PUT") return put_toggles(id, request.body);
        if (what == "discover" && m == "POST") return discover(id, request.body);
        if (what == "curve" && m == "GET") return curve(id, request.query);
      }
    }
    return error_response(404, "not_found", "no route for " + m + " " + request.path);
  } catch (const HttpError& e) {
    return error_response(e.status(), e.code(), e.what(), e.field());
  } catch (const Error& e) {
    return error_response(400, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

Response Service::upload_log(const std::string& body, const std::string& content_type,
                             const std::map<std::string, std::string>& query) {
  if (body.size() > config_.upload_limit) {
    throw HttpError(413, "payload_too_large",
                    "upload of " + std::to_string(body.size()) + " bytes exceeds the limit of " +
                        std::to_string(config_.upload_limit) + " bytes");
  }
  const std::string type = media_type(content_type);
  IngestResult ingested;
  if (type == "text/csv" || type == "application/csv") {
    CsvOptions options;
    if (auto it = query.find("case"); it != query.end()) options.case_column = it->second;
    if (auto it = query.find("activity"); it != query.end()) options.activity_column = it->second;
    if (auto it = query.find("order"); it != query.end()) options.order_column = it->second;
    ingested = ingest_csv(body, options);
  } else if (type == "application/xml" || type == "text/xml" || type == "application/x-xes" ||
             type == "application/xes+xml") {
    XesOptions options;
    options.lenient = parse_flag(query, "lenient");
    options.complete_only = parse_flag(query, "complete_only");
    ingested = ingest_xes(body, options);
  } else {
    throw HttpError(415, "unsupported_media_type",
                    "content type '" + content_type + "' is not supported; send text/csv or application/xml",
                    "content-type");
  }
  if (ingested.log.empty()) throw HttpError(400, "invalid_argument", "empty log", "body");
  const auto activities = ingested.log.activities().size();
  if (activities > config_.max_activities) {
    throw HttpError(400, "too_many_activities",
                    "log has " + std::to_string(activities) + " activities; the limit is " +
                        std::to_string(config_.max_activities) +
                        ". Project the log onto fewer activities before uploading.");
  }
  auto slot = store_.create(std::move(ingested.log));
  std::lock_guard lock(slot->mutex);
  const Session& session = slot->session;
  const auto counts = session.log.activity_counts();
  Json frequencies = Json::object();
  for (ActivityId a : session.log.activities()) frequencies[session.log.name(a)] = counts[a];
  return {201,
          {{"session_id", session.id},
           {"alphabet", session.log.activity_names()},
           {"activity_frequencies", std::move(frequencies)},
           {"trace_count", session.log.trace_count()},
           {"dropped_traces", ingested.dropped_traces},
           {"skipped_events", ingested.skipped_events}}};
}

FilterSchedule Service::schedule_for(SessionSlot& slot, const FilterMethod& method) {
  const std::string key = cache_key(method);
  EventLog log;
  {
    std::lock_guard lock(slot.mutex);
    auto it = slot.session.schedules.find(key);
    if (it != slot.session.schedules.end() && it->second.source_digest == slot.session.log.digest()) {
      return it->second;
    }
    log = slot.session.log;
  }
  FilterSchedule schedule = run_filter(log, method);
  std::lock_guard lock(slot.mutex);
  if (slot.session.log.digest() == schedule.source_digest) {
    slot.session.schedules[key] = schedule;
    store_.persist(slot.session);
  }
  return schedule;
}

Response Service::run_job(const std::string& key, std::function<Json()> work) {
  Job job;
  {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(key);
    if (it == jobs_.end()) it = jobs_.emplace(key, std::async(std::launch::async, std::move(work)).share()).first;
    job = it->second;
  }
  if (job.wait_for(config_.job_wait) != std::future_status::ready) {
    return {202, {{"status", "running"}, {"job", key}}};
  }
  {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(key);
    if (it != jobs_.end()) jobs_.erase(it);
  }
  return {200, job.get()};
}

Response Service::ranking(const std::string& id, const std::map<std::string, std::string>& query) {
  auto slot = require(store_, id);
  const FilterMethod method = method_from_query(query);
  std::string digest;
  {
    std::lock_guard lock(slot->mutex);
    digest = slot->session.log.digest();
  }
  return run_job("ranking/" + id + "/" + cache_key(method) + "/" + digest, [this, slot, method] {
    const FilterSchedule schedule = schedule_for(*slot, method);
    std::lock_guard lock(slot->mutex);
    return ranking_document(slot->session.log, schedule, slot->session.disabled);
  });
}

Response Service::put_toggles(const std::string& id, const std::string& body) {
  auto slot = require(store_, id);
  const Json request = parse_body(body);
  if (!request.is_object() || !request.contains("disabled") || !request.at("disabled").is_array()) {
    throw HttpError(400, "invalid_argument", "body must be an object with a 'disabled' array", "disabled");
  }
  std::lock_guard lock(slot->mutex);
  Session& session = slot->session;
  std::set<std::string> disabled;
  const auto& list = request.at("disabled");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string field = "disabled[" + std::to_string(i) + "]";
    if (!list[i].is_string()) throw HttpError(400, "invalid_argument", "activity names must be strings", field);
    const auto name = list[i].get<std::string>();
    if (!session.log.find(name)) throw HttpError(400, "invalid_argument", "unknown activity '" + name + "'", field);
    disabled.insert(name);
  }
  session.disabled = std::move(disabled);
  session.touch();
  store_.persist(session);
  return {200,
          {{"disabled", session.disabled},
           {"enabled", session.enabled()},
           {"explained_ratio", session.explained_ratio()}}};
}

Response Service::discover(const std::string& id, const std::string& body) {
  auto slot = require(store_, id);
  const Json request = parse_body(body);
  if (!request.is_object()) throw HttpError(400, "invalid_argument", "body must be a JSON object", "body");
  DiscoveryConfig config;
  if (request.contains("edge_filter_ratio")) {
    const auto& ratio = request.at("edge_filter_ratio");
    if (!ratio.is_number()) throw HttpError(400, "invalid_argument", "must be a number", "edge_filter_ratio");
    config.edge_filter_ratio = ratio.get<double>();
    try {
      config.validate();
    } catch (const Error& e) {
      throw HttpError(400, e.code(), e.what(), "edge_filter_ratio");
    }
  }
  EventLog projected;
  std::set<std::string> enabled;
  {
    std::lock_guard lock(slot->mutex);
    Session& session = slot->session;
    enabled = session.enabled();
    if (enabled.size() < 2) throw HttpError(400, "invalid_argument", "fewer than 2 activities enabled", "disabled");
    session.discovery = config;
    session.touch();
    store_.persist(session);
    projected = project_names(session.log, enabled);
  }
  const ModelQuality quality = evaluate_model(projected, config);
  Json out{{"process_tree", tree_to_json(quality.tree)},
           {"process_tree_text", format_tree(quality.tree)},
           {"dfg", dfg_to_json(build_dfg(projected), projected)},
           {"activities", enabled},
           {"fitness_fraction", quality.replay.fitness_fraction},
           {"flower_baseline", quality.flower_baseline},
           {"edge_filter_ratio", config.edge_filter_ratio}};
  out["nondeterminism"] = quality.replay.nondeterminism ? Json(*quality.replay.nondeterminism) : Json(nullptr);
  return {200, std::move(out)};
}

Response Service::curve(const std::string& id, const std::map<std::string, std::string>& query) {
  auto slot = require(store_, id);
  const FilterMethod method = method_from_query(query);
  const bool pooled = parse_flag(query, "pooled");
  std::string key;
  {
    std::lock_guard lock(slot->mutex);
    key = "curve/" + id + "/" + cache_key(method) + "/" + slot->session.log.digest() + "/" +
          Json(slot->session.discovery.edge_filter_ratio).dump() + (pooled ? "/pooled" : "");
  }
  return run_job(key, [this, slot, method, pooled, id] {
    const FilterSchedule schedule = schedule_for(*slot, method);
    EventLog log;
    DiscoveryConfig config;
    {
      std::lock_guard lock(slot->mutex);
      log = slot->session.log;
      config = slot->session.discovery;
    }
    const auto records =
        explained_activity_curve(log, schedule, config, pooled ? Averaging::pooled : Averaging::per_trace, id);
    Json out{{"status", "done"}, {"method", method.label()}, {"records", Json::array()}};
    for (const auto& record : records) out["records"].push_back(quality_to_json(record));
    return out;
  });
}

Response Service::get_session(const std::string& id) {
  auto slot = require(store_, id);
  std::lock_guard lock(slot->mutex);
  const Session& session = slot->session;
  const auto counts = session.log.activity_counts();
  Json frequencies = Json::object();
  for (ActivityId a : session.log.activities()) frequencies[session.log.name(a)] = counts[a];
  Json cached = Json::array();
  for (const auto& [key, schedule] : session.schedules) cached.push_back(key);
  return {200,
          {{"session_id", session.id},
           {"alphabet", session.log.activity_names()},
           {"activity_frequencies", std::move(frequencies)},
           {"trace_count", session.log.trace_count()},
           {"variant_count", session.log.variant_count()},
           {"digest", session.log.digest()},
           {"disabled", session.disabled},
           {"explained_ratio", session.explained_ratio()},
           {"discovery", {{"edge_filter_ratio", session.discovery.edge_filter_ratio}}},
           {"cached_schedules", std::move(cached)},
           {"created", session.created},
           {"updated", session.updated}}};
}

Response Service::delete_session(const std::string& id) {
  if (!store_.erase(id)) not_found(id);
  return {200, {{"deleted", id}}};
}

}  // namespace chaosmine
