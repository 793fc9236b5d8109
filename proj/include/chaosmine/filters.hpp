#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaosmine/event_log.hpp"

namespace chaosmine {

enum class FilterKind {
  direct_entropy,
  indirect_entropy,
  least_frequent_first,
  most_frequent_first,
  random,
};

struct FilterMethod {
  FilterKind kind = FilterKind::direct_entropy;
  bool laplace = false;                // entropy kinds only
  std::optional<std::uint64_t> seed;  // random only, required there

  // Throws InvalidArgument when the flag/seed combination is not allowed.
  void validate() const;

  // "direct-entropy", "direct-entropy-laplace", "random", ...
  std::string label() const;

  friend bool operator==(const FilterMethod&, const FilterMethod&) = default;
};

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view text);
// Accepts the labels produced by FilterMethod::label().
FilterMethod parse_filter_method(std::string_view label, std::optional<std::uint64_t> seed = std::nullopt);

// The four entropy configurations plus the two frequency baselines.
std::vector<FilterMethod> deterministic_methods();
// deterministic_methods() followed by the seeded random order.
std::vector<FilterMethod> all_methods(std::uint64_t random_seed);

// Entropy-based criteria closer than this are treated as tied.
inline constexpr double kCriterionTolerance = 1e-9;

struct ScheduleStep {
  std::string activity;
  double criterion = 0.0;
  double alpha = 0.0;  // smoothing weight in force at this step
};

// Ordered removals produced by one filter run. Element i of the list of
// filtered logs is rebuilt by `materialize(log, schedule, i)`.
struct FilterSchedule {
  FilterMethod method;
  std::vector<ScheduleStep> removal_order;
  // The last two activities, ordered the way the method would have removed
  // them, with criterion values evaluated on the two-activity remnant.
  std::vector<ScheduleStep> retained;
  std::string source_digest;
  std::string diagnostic;
};

FilterSchedule run_filter(const EventLog& log, const FilterMethod& method);

// Log with the first `steps` scheduled activities projected out.
EventLog materialize(const EventLog& log, const FilterSchedule& schedule, std::size_t steps);

// removal_order followed by retained.
std::vector<std::string> full_ranking(const FilterSchedule& schedule);

// CSV with columns step,activity,criterion,method,alpha. Retained rows carry
// "retained" in the step column.
std::string to_csv(const FilterSchedule& schedule);

// Criterion of `method` for every current activity of `log` (the quantity the
// next greedy step optimizes), in activity id order.
std::vector<ScheduleStep> step_criteria(const EventLog& log, const FilterMethod& method);

}  // namespace chaosmine
