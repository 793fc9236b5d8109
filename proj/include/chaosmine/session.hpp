#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chaosmine/discovery.hpp"
#include "chaosmine/event_log.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/serialization.hpp"

namespace chaosmine {

inline constexpr int kSessionSchemaVersion = 1;

struct Session {
  std::string id;
  EventLog log;
  std::set<std::string> disabled;
  DiscoveryConfig discovery;
  std::map<std::string, FilterSchedule> schedules;  // keyed by cache_key()
  std::int64_t created = 0;                        // unix seconds
  std::int64_t updated = 0;

  // Activities of the base log that are not disabled.
  std::set<std::string> enabled() const;
  double explained_ratio() const;
  // Sets `updated` to the current time.
  void touch();
};

// Cache key of a method: its label, plus the seed for seeded methods.
std::string cache_key(const FilterMethod& method);

Json session_to_json(const Session& session);
// Schedules whose digest no longer matches the log are dropped and reported
// through `warnings`.
Session session_from_json(const Json& value, std::vector<std::string>* warnings = nullptr);

// A live session guarded by its own mutex.
struct SessionSlot {
  std::mutex mutex;
  Session session;
};

// In-memory sessions, optionally backed by a directory of JSON documents
// (one "<id>.json" per session). Sessions on disk are loaded on first use.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> directory = std::nullopt);

  std::shared_ptr<SessionSlot> create(EventLog log);
  // nullptr when the id is unknown both in memory and on disk.
  std::shared_ptr<SessionSlot> find(const std::string& id);
  bool erase(const std::string& id);

  // Writes the session document; no-op without a backing directory.
  void persist(const Session& session) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::string fresh_id();

  std::optional<std::filesystem::path> directory_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> live_;
  std::vector<std::string> warnings_;
  std::uint64_t counter_ = 0;
};

// Writes `session` to `directory/<id>.json`.
void persist_session(const Session& session, const std::filesystem::path& directory);
Session load_session(const std::filesystem::path& file, std::vector<std::string>* warnings = nullptr);

}  // namespace chaosmine
