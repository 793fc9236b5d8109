#include "chaosmine/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "chaosmine/entropy.hpp"
#include "chaosmine/error.hpp"
#include "chaosmine/random.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

// True when the method removes the activity with the largest criterion.
bool maximizes(FilterKind kind) {
  return kind == FilterKind::direct_entropy || kind == FilterKind::most_frequent_first;
}

bool is_entropy(FilterKind kind) {
  return kind == FilterKind::direct_entropy || kind == FilterKind::indirect_entropy;
}

// Orders candidates best-first: by criterion in the method's direction, ties
// (within tolerance of each other) by name. Ids are name-ordered, so the
// name tie-break is an id comparison.
std::vector<ScheduleStep> best_first(std::vector<ScheduleStep> steps, FilterKind kind) {
  std::vector<ScheduleStep> ordered;
  while (!steps.empty()) {
    double best = steps.front().criterion;
    for (const auto& s : steps) {
      best = maximizes(kind) ? std::max(best, s.criterion) : std::min(best, s.criterion);
    }
    auto pick = steps.end();
    for (auto it = steps.begin(); it != steps.end(); ++it) {
      if (std::abs(it->criterion - best) > kCriterionTolerance) continue;
      if (pick == steps.end() || it->activity < pick->activity) pick = it;
    }
    ordered.push_back(std::move(*pick));
    steps.erase(pick);
  }
  return ordered;
}

EventLog occurring_only(const EventLog& log) {
  const auto acts = log.activities();
  if (acts.size() == log.alphabet().size()) return log;
  return project(log, std::set<ActivityId>(acts.begin(), acts.end()));
}

FilterSchedule random_schedule(const EventLog& log, const FilterMethod& method) {
  FilterSchedule schedule;
  auto names = log.activity_names();
  Rng rng(*method.seed);
  for (std::size_t i = names.size(); i > 1; --i) {
    std::swap(names[i - 1], names[rng.below(i)]);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto& target = i + 2 < names.size() ? schedule.removal_order : schedule.retained;
    target.push_back({names[i], 0.0, 0.0});
  }
  return schedule;
}

}  // namespace

void FilterMethod::validate() const {
  if (laplace && !is_entropy(kind)) {
    throw InvalidArgument("Laplace smoothing only applies to entropy filters");
  }
  if (kind == FilterKind::random && !seed) throw InvalidArgument("the random filter requires a seed");
  if (kind != FilterKind::random && seed) {
    throw InvalidArgument("a seed is only accepted by the random filter");
  }
}

std::string FilterMethod::label() const {
  std::string text(to_string(kind));
  if (laplace) text += "-laplace";
  return text;
}

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::direct_entropy: return "direct-entropy";
    case FilterKind::indirect_entropy: return "indirect-entropy";
    case FilterKind::least_frequent_first: return "least-frequent-first";
    case FilterKind::most_frequent_first: return "most-frequent-first";
    case FilterKind::random: return "random";
  }
  return "unknown";
}

FilterKind parse_filter_kind(std::string_view text) {
  for (auto kind : {FilterKind::direct_entropy, FilterKind::indirect_entropy,
                    FilterKind::least_frequent_first, FilterKind::most_frequent_first,
                    FilterKind::random}) {
    if (to_string(kind) == text) return kind;
  }
  throw InvalidArgument("unknown filter method '" + std::string(text) + "'");
}

FilterMethod parse_filter_method(std::string_view label, std::optional<std::uint64_t> seed) {
  FilterMethod method;
  constexpr std::string_view suffix = "-laplace";
  if (label.ends_with(suffix)) {
    method.laplace = true;
    label.remove_suffix(suffix.size());
  }
  method.kind = parse_filter_kind(label);
  if (method.kind == FilterKind::random) method.seed = seed;
  method.validate();
  return method;
}

std::vector<FilterMethod> deterministic_methods() {
  return {
      {FilterKind::direct_entropy, false, std::nullopt},
      {FilterKind::direct_entropy, true, std::nullopt},
      {FilterKind::indirect_entropy, false, std::nullopt},
      {FilterKind::indirect_entropy, true, std::nullopt},
      {FilterKind::least_frequent_first, false, std::nullopt},
      {FilterKind::most_frequent_first, false, std::nullopt},
  };
}

std::vector<FilterMethod> all_methods(std::uint64_t random_seed) {
  auto methods = deterministic_methods();
  methods.push_back({FilterKind::random, false, random_seed});
  return methods;
}

std::vector<ScheduleStep> step_criteria(const EventLog& log, const FilterMethod& method) {
  std::vector<ScheduleStep> result;
  switch (method.kind) {
    case FilterKind::direct_entropy: {
      const auto stats = build_follow_stats(log);
      const double alpha = method.laplace ? adaptive_alpha(stats) : 0.0;
      for (ActivityId a : stats.activities()) {
        result.push_back({log.name(a), activity_entropy(stats, a, alpha), alpha});
      }
      break;
    }
    case FilterKind::indirect_entropy: {
      for (ActivityId a : log.activities()) {
        const auto stats = build_follow_stats(log, a);
        const double alpha = method.laplace ? adaptive_alpha(stats) : 0.0;
        result.push_back({log.name(a), log_entropy(stats, alpha), alpha});
      }
      break;
    }
    case FilterKind::least_frequent_first:
    case FilterKind::most_frequent_first: {
      const auto counts = log.activity_counts();
      for (ActivityId a : log.activities()) {
        result.push_back({log.name(a), static_cast<double>(counts[a]), 0.0});
      }
      break;
    }
    case FilterKind::random:
      for (ActivityId a : log.activities()) result.push_back({log.name(a), 0.0, 0.0});
      break;
  }
  return result;
}

FilterSchedule run_filter(const EventLog& log, const FilterMethod& method) {
  method.validate();
  FilterSchedule schedule;
  if (method.kind == FilterKind::random) {
    schedule = random_schedule(log, method);
  } else {
    EventLog current = occurring_only(log);
    while (current.alphabet().size() > 2) {
      auto ordered = best_first(step_criteria(current, method), method.kind);
      schedule.removal_order.push_back(ordered.front());
      current = remove_names(current, {ordered.front().activity});
    }
    schedule.retained = best_first(step_criteria(current, method), method.kind);
  }
  schedule.method = method;
  schedule.source_digest = log.digest();
  if (schedule.removal_order.empty()) {
    schedule.diagnostic = "fewer than 3 activities; nothing to filter";
  }
  return schedule;
}

EventLog materialize(const EventLog& log, const FilterSchedule& schedule, std::size_t steps) {
  if (log.digest() != schedule.source_digest) {
    throw StaleSchedule("schedule was computed for log " + schedule.source_digest +
                        ", not for log " + log.digest());
  }
  if (steps > schedule.removal_order.size()) {
    throw InvalidArgument("step " + std::to_string(steps) + " exceeds the " +
                          std::to_string(schedule.removal_order.size()) + " scheduled removals");
  }
  if (steps == 0) return log;
  std::set<std::string> drop;
  for (std::size_t i = 0; i < steps; ++i) drop.insert(schedule.removal_order[i].activity);
  std::set<ActivityId> keep;
  for (ActivityId a : log.activities()) {
    if (!drop.contains(log.name(a))) keep.insert(a);
  }
  return project(log, keep);
}

std::vector<std::string> full_ranking(const FilterSchedule& schedule) {
  std::vector<std::string> ranking;
  for (const auto& s : schedule.removal_order) ranking.push_back(s.activity);
  for (const auto& s : schedule.retained) ranking.push_back(s.activity);
  return ranking;
}

std::string to_csv(const FilterSchedule& schedule) {
  std::string out = "step,activity,criterion,method,alpha\n";
  const std::string method = schedule.method.label();
  auto row = [&](const std::string& step, const ScheduleStep& s) {
    char numbers[64];
    out += step + "," + csv_field(s.activity) + ",";
    std::snprintf(numbers, sizeof numbers, "%.17g", s.criterion);
    out += numbers;
    out += "," + method + ",";
    std::snprintf(numbers, sizeof numbers, "%.17g", s.alpha);
    out += numbers;
    out += "\n";
  };
  for (std::size_t i = 0; i < schedule.removal_order.size(); ++i) {
    row(std::to_string(i + 1), schedule.removal_order[i]);
  }
  for (const auto& s : schedule.retained) row("retained", s);
  return out;
}

}  // namespace chaosmine
