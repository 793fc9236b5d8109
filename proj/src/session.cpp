#include "chaosmine/session.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>

#include "chaosmine/error.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/random.hpp"

namespace chaosmine {

namespace {

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' ||
                    c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::set<std::string> Session::enabled() const {
  std::set<std::string> out;
  for (const auto& name : log.activity_names()) {
    if (!disabled.contains(name)) out.insert(name);
  }
  return out;
}

double Session::explained_ratio() const {
  const auto total = log.activities().size();
  if (total == 0) return 0.0;
  return static_cast<double>(enabled().size()) / static_cast<double>(total);
}

void Session::touch() { updated = now_seconds(); }

std::string cache_key(const FilterMethod& method) {
  std::string key = method.label();
  if (method.seed) key += "@" + std::to_string(*method.seed);
  return key;
}

Json session_to_json(const Session& session) {
  Json schedules = Json::object();
  for (const auto& [key, schedule] : session.schedules) schedules[key] = schedule_to_json(schedule);
  return {{"version", kSessionSchemaVersion},
          {"id", session.id},
          {"log", log_to_json(session.log)},
          {"digest", session.log.digest()},
          {"disabled", session.disabled},
          {"discovery", {{"edge_filter_ratio", session.discovery.edge_filter_ratio}}},
          {"schedules", std::move(schedules)},
          {"created", session.created},
          {"updated", session.updated}};
}

Session session_from_json(const Json& value, std::vector<std::string>* warnings) {
  if (!value.is_object() || !value.contains("version")) throw InvalidArgument("session document has no version");
  const auto& version = value.at("version");
  if (!version.is_number_integer() || version.get<int>() != kSessionSchemaVersion) {
    throw InvalidArgument("unsupported session schema version " + version.dump() + " (expected " +
                          std::to_string(kSessionSchemaVersion) + ")");
  }
  Session session;
  try {
    session.id = value.at("id").get<std::string>();
    session.log = log_from_json(value.at("log"));
    for (const auto& name : value.at("disabled")) {
      const auto activity = name.get<std::string>();
      if (!session.log.find(activity)) throw InvalidArgument("disabled activity '" + activity + "' not in log");
      session.disabled.insert(activity);
    }
    session.discovery.edge_filter_ratio = value.at("discovery").value("edge_filter_ratio", 0.0);
    session.discovery.validate();
    const std::string digest = session.log.digest();
    for (const auto& [key, stored] : value.at("schedules").items()) {
      FilterSchedule schedule = schedule_from_json(stored);
      if (schedule.source_digest != digest) {
        if (warnings) warnings->push_back("session " + session.id + ": dropped stale schedule " + key);
        continue;
      }
      session.schedules.emplace(key, std::move(schedule));
    }
    session.created = value.at("created").get<std::int64_t>();
    session.updated = value.at("updated").get<std::int64_t>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed session document: ") + e.what());
  }
  return session;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {
  if (directory_) {
    std::error_code ec;
    std::filesystem::create_directories(*directory_, ec);
    if (ec) throw Error("io_error", "cannot create session store " + directory_->string() + ": " + ec.message());
  }
}

std::string SessionStore::fresh_id() {
  static thread_local Rng rng(std::random_device{}() ^ static_cast<std::uint64_t>(now_seconds()));
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(rng.next() ^ mix_seed(++counter_)));
  return buffer;
}

std::shared_ptr<SessionSlot> SessionStore::create(EventLog log) {
  auto slot = std::make_shared<SessionSlot>();
  slot->session.log = std::move(log);
  slot->session.created = slot->session.updated = now_seconds();
  {
    std::lock_guard lock(mutex_);
    do {
      slot->session.id = fresh_id();
    } while (live_.contains(slot->session.id) ||
             (directory_ && std::filesystem::exists(*directory_ / (slot->session.id + ".json"))));
    live_.emplace(slot->session.id, slot);
  }
  persist(slot->session);
  return slot;
}

std::shared_ptr<SessionSlot> SessionStore::find(const std::string& id) {
  if (!valid_id(id)) return nullptr;
  std::lock_guard lock(mutex_);
  if (auto it = live_.find(id); it != live_.end()) return it->second;
  if (!directory_) return nullptr;
  const auto file = *directory_ / (id + ".json");
  if (!std::filesystem::exists(file)) return nullptr;
  auto slot = std::make_shared<SessionSlot>();
  slot->session = load_session(file, &warnings_);
  live_.emplace(id, slot);
  return slot;
}

bool SessionStore::erase(const std::string& id) {
  if (!valid_id(id)) return false;
  std::lock_guard lock(mutex_);
  bool found = live_.erase(id) > 0;
  if (directory_) {
    std::error_code ec;
    found = std::filesystem::remove(*directory_ / (id + ".json"), ec) || found;
  }
  return found;
}

void SessionStore::persist(const Session& session) const {
  if (directory_) persist_session(session, *directory_);
}

void persist_session(const Session& session, const std::filesystem::path& directory) {
  const auto target = directory / (session.id + ".json");
  const auto temporary = directory / (session.id + ".json.tmp");
  write_file(temporary.string(), canonical_dump(session_to_json(session)));
  std::error_code ec;
  std::filesystem::rename(temporary, target, ec);
  if (ec) throw Error("io_error", "cannot write " + target.string() + ": " + ec.message());
}

Session load_session(const std::filesystem::path& file, std::vector<std::string>* warnings) {
  const std::string text = read_file(file.string());
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("cannot parse " + file.string() + ": " + e.what());
  }
  return session_from_json(value, warnings);
}

}  // namespace chaosmine
