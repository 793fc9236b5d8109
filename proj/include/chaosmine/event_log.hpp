#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chaosmine {

// Dense handle of an activity inside one log's alphabet.
using ActivityId = std::uint32_t;

// Virtual ids of the artificial start and end events. They never belong to an
// alphabet.
inline constexpr ActivityId kStartSentinel = 0xFFFFFFFEu;
inline constexpr ActivityId kEndSentinel = 0xFFFFFFFFu;

// Labels used when sentinels are rendered in reports.
inline constexpr std::string_view kStartLabel = "⌊";
inline constexpr std::string_view kEndLabel = "⌋";

using Trace = std::vector<ActivityId>;

// Multiset of non-empty traces over an interned alphabet, stored as
// variant -> multiplicity.
//
// Construction canonicalizes the alphabet: ids are assigned in byte-wise
// name order, so two logs with the same variant multiset are equal
// value-for-value regardless of the order their traces were read in.
class EventLog {
 public:
  using VariantMap = std::map<Trace, std::uint64_t>;

  EventLog() = default;

  // Builds a log from named traces. Traces must be non-empty and counts
  // positive; duplicates are merged.
  static EventLog from_named(
      const std::vector<std::pair<std::vector<std::string>, std::uint64_t>>& traces);

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const VariantMap& variants() const noexcept { return variants_; }

  std::optional<ActivityId> find(std::string_view name) const;
  // Throws InvalidArgument for unknown names.
  ActivityId id(std::string_view name) const;
  const std::string& name(ActivityId id) const;

  bool empty() const noexcept { return variants_.empty(); }
  std::uint64_t trace_count() const noexcept { return trace_count_; }
  std::uint64_t event_count() const noexcept { return event_count_; }
  std::size_t variant_count() const noexcept { return variants_.size(); }

  // Ids occurring in at least one variant, ascending (= name order).
  std::vector<ActivityId> activities() const;
  std::vector<std::string> activity_names() const;
  // #(<a>, L) indexed by id.
  std::vector<std::uint64_t> activity_counts() const;

  std::vector<std::string> names_of(const Trace& trace) const;

  // 64-bit FNV-1a of the canonical variant listing, as 16 hex digits.
  std::string digest() const;

  friend bool operator==(const EventLog& lhs, const EventLog& rhs) {
    return lhs.alphabet_ == rhs.alphabet_ && lhs.variants_ == rhs.variants_;
  }

 private:
  friend class LogBuilder;

  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, ActivityId> index_;
  VariantMap variants_;
  std::uint64_t trace_count_ = 0;
  std::uint64_t event_count_ = 0;
};

// Single-owner construction of an EventLog.
class LogBuilder {
 public:
  ActivityId intern(std::string_view name);
  // Registers a name in the alphabet without adding any event.
  void declare(std::string_view name) { intern(name); }

  void add_trace(std::span<const std::string> names, std::uint64_t count = 1);
  // Ids refer to this builder's interning table. Empty traces are rejected.
  void add_trace_ids(const Trace& trace, std::uint64_t count = 1);

  std::size_t alphabet_size() const noexcept { return names_.size(); }

  EventLog build() &&;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ActivityId> index_;
  std::map<Trace, std::uint64_t> variants_;
};

// #(pattern, L): multiplicity-weighted count of contiguous (possibly
// overlapping) occurrences.
std::uint64_t count_subsequence(const Trace& pattern, const EventLog& log);

struct ProjectionResult {
  EventLog log;
  std::uint64_t dropped_traces = 0;  // traces that became empty
};

// L restricted to `keep`. The alphabet of the result is exactly `keep`.
ProjectionResult project_counted(const EventLog& log, const std::set<ActivityId>& keep);
EventLog project(const EventLog& log, const std::set<ActivityId>& keep);
EventLog project_names(const EventLog& log, const std::set<std::string>& keep);
// Removes the named activities.
EventLog remove_names(const EventLog& log, const std::set<std::string>& drop);

enum class AugmentMode { end_appended, start_prepended };

// Read-only view of a log whose traces carry an artificial end (or start)
// event. The base log is referenced, never copied or mutated.
class AugmentedView {
 public:
  AugmentedView(const EventLog& base, AugmentMode mode) : base_(&base), mode_(mode) {}

  class iterator {
   public:
    using value_type = std::pair<Trace, std::uint64_t>;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(EventLog::VariantMap::const_iterator it, AugmentMode mode) : it_(it), mode_(mode) {}

    value_type operator*() const;
    iterator& operator++() {
      ++it_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++it_;
      return copy;
    }
    bool operator==(const iterator& other) const { return it_ == other.it_; }

   private:
    EventLog::VariantMap::const_iterator it_;
    AugmentMode mode_ = AugmentMode::end_appended;
  };

  iterator begin() const { return {base_->variants().begin(), mode_}; }
  iterator end() const { return {base_->variants().end(), mode_}; }

  const EventLog& base() const noexcept { return *base_; }
  AugmentMode mode() const noexcept { return mode_; }

  Trace augmented(const Trace& trace) const;

 private:
  const EventLog* base_;
  AugmentMode mode_;
};

AugmentedView augment(const EventLog& log, AugmentMode mode);

}  // namespace chaosmine
