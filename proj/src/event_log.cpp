#include "chaosmine/event_log.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "chaosmine/error.hpp"

namespace chaosmine {

namespace {

void validate_name(std::string_view name) {
  if (name.empty()) throw InvalidArgument("activity names must be non-empty");
  if (name == kStartLabel || name == kEndLabel) {
    throw InvalidArgument("activity name '" + std::string(name) + "' is reserved for sentinels");
  }
}

}  // namespace

EventLog EventLog::from_named(
    const std::vector<std::pair<std::vector<std::string>, std::uint64_t>>& traces) {
  LogBuilder builder;
  for (const auto& [names, count] : traces) builder.add_trace(names, count);
  return std::move(builder).build();
}

std::optional<ActivityId> EventLog::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ActivityId EventLog::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw InvalidArgument("unknown activity '" + std::string(name) + "'");
  return *found;
}

const std::string& EventLog::name(ActivityId id) const {
  if (id >= alphabet_.size()) throw InvalidArgument("activity id out of range");
  return alphabet_[id];
}

std::vector<ActivityId> EventLog::activities() const {
  std::vector<bool> seen(alphabet_.size(), false);
  for (const auto& [trace, count] : variants_) {
    for (ActivityId a : trace) seen[a] = true;
  }
  std::vector<ActivityId> result;
  for (ActivityId a = 0; a < seen.size(); ++a) {
    if (seen[a]) result.push_back(a);
  }
  return result;
}

std::vector<std::string> EventLog::activity_names() const {
  std::vector<std::string> names;
  for (ActivityId a : activities()) names.push_back(alphabet_[a]);
  return names;
}

std::vector<std::uint64_t> EventLog::activity_counts() const {
  std::vector<std::uint64_t> counts(alphabet_.size(), 0);
  for (const auto& [trace, count] : variants_) {
    for (ActivityId a : trace) counts[a] += count;
  }
  return counts;
}

std::vector<std::string> EventLog::names_of(const Trace& trace) const {
  std::vector<std::string> names;
  names.reserve(trace.size());
  for (ActivityId a : trace) names.push_back(name(a));
  return names;
}

std::string EventLog::digest() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&hash](std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  // Unit separators keep names containing ',' unambiguous.
  for (const auto& [trace, count] : variants_) {
    feed(std::to_string(count));
    feed("\x1d");
    for (ActivityId a : trace) {
      feed(alphabet_[a]);
      feed("\x1f");
    }
    feed("\x1e");
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

ActivityId LogBuilder::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  validate_name(name);
  const auto id = static_cast<ActivityId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return id;
}

void LogBuilder::add_trace(std::span<const std::string> names, std::uint64_t count) {
  Trace trace;
  trace.reserve(names.size());
  for (const auto& n : names) trace.push_back(intern(n));
  add_trace_ids(trace, count);
}

void LogBuilder::add_trace_ids(const Trace& trace, std::uint64_t count) {
  if (trace.empty()) throw InvalidArgument("traces must be non-empty");
  if (count == 0) throw InvalidArgument("trace multiplicity must be positive");
  for (ActivityId a : trace) {
    if (a >= names_.size()) throw InvalidArgument("activity id not interned by this builder");
  }
  variants_[trace] += count;
}

EventLog LogBuilder::build() && {
  std::vector<ActivityId> order(names_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [this](ActivityId l, ActivityId r) { return names_[l] < names_[r]; });
  std::vector<ActivityId> remap(names_.size());
  EventLog log;
  log.alphabet_.reserve(names_.size());
  for (ActivityId rank = 0; rank < order.size(); ++rank) {
    remap[order[rank]] = rank;
    log.alphabet_.push_back(std::move(names_[order[rank]]));
    log.index_.emplace(log.alphabet_.back(), rank);
  }
  for (auto& [trace, count] : variants_) {
    Trace mapped;
    mapped.reserve(trace.size());
    for (ActivityId a : trace) mapped.push_back(remap[a]);
    log.variants_[std::move(mapped)] += count;
    log.trace_count_ += count;
    log.event_count_ += count * trace.size();
  }
  names_.clear();
  index_.clear();
  variants_.clear();
  return log;
}

std::uint64_t count_subsequence(const Trace& pattern, const EventLog& log) {
  if (pattern.empty()) throw InvalidArgument("pattern must be non-empty");
  std::uint64_t total = 0;
  for (const auto& [trace, count] : log.variants()) {
    if (trace.size() < pattern.size()) continue;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i + pattern.size() <= trace.size(); ++i) {
      if (std::equal(pattern.begin(), pattern.end(), trace.begin() + static_cast<std::ptrdiff_t>(i))) {
        ++hits;
      }
    }
    total += hits * count;
  }
  return total;
}

ProjectionResult project_counted(const EventLog& log, const std::set<ActivityId>& keep) {
  LogBuilder builder;
  std::vector<ActivityId> remap(log.alphabet().size(), kEndSentinel);
  for (ActivityId a : keep) {
    if (a >= log.alphabet().size()) throw InvalidArgument("projection keeps an unknown activity id");
    remap[a] = builder.intern(log.name(a));
  }
  ProjectionResult result;
  for (const auto& [trace, count] : log.variants()) {
    Trace projected;
    for (ActivityId a : trace) {
      if (remap[a] != kEndSentinel) projected.push_back(remap[a]);
    }
    if (projected.empty()) {
      result.dropped_traces += count;
    } else {
      builder.add_trace_ids(projected, count);
    }
  }
  result.log = std::move(builder).build();
  return result;
}

EventLog project(const EventLog& log, const std::set<ActivityId>& keep) {
  return project_counted(log, keep).log;
}

EventLog project_names(const EventLog& log, const std::set<std::string>& keep) {
  std::set<ActivityId> ids;
  for (const auto& n : keep) ids.insert(log.id(n));
  return project(log, ids);
}

EventLog remove_names(const EventLog& log, const std::set<std::string>& drop) {
  for (const auto& n : drop) log.id(n);
  std::set<ActivityId> keep;
  for (ActivityId a = 0; a < log.alphabet().size(); ++a) {
    if (!drop.contains(log.name(a))) keep.insert(a);
  }
  return project(log, keep);
}

namespace {

Trace with_sentinel(const Trace& trace, AugmentMode mode) {
  Trace seq;
  seq.reserve(trace.size() + 1);
  if (mode == AugmentMode::start_prepended) seq.push_back(kStartSentinel);
  seq.insert(seq.end(), trace.begin(), trace.end());
  if (mode == AugmentMode::end_appended) seq.push_back(kEndSentinel);
  return seq;
}

}  // namespace

AugmentedView::iterator::value_type AugmentedView::iterator::operator*() const {
  return {with_sentinel(it_->first, mode_), it_->second};
}

Trace AugmentedView::augmented(const Trace& trace) const { return with_sentinel(trace, mode_); }

AugmentedView augment(const EventLog& log, AugmentMode mode) { return {log, mode}; }

}  // namespace chaosmine
