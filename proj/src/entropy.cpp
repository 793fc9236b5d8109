#include "chaosmine/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "chaosmine/error.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

std::size_t require_index(const FollowStats& stats, ActivityId a, double alpha) {
  auto idx = stats.index_of(a);
  if (!idx && alpha <= 0.0) {
    throw UndefinedDistribution("activity " + std::to_string(a) +
                                " does not occur and no smoothing is applied");
  }
  return idx.value_or(kAbsent);
}

DistributionVector smoothed(const FollowStats& stats, std::size_t idx, double alpha, bool follow) {
  const std::size_t n = stats.size();
  DistributionVector v;
  v.entries.resize(n + 1);
  const double observed = idx == kAbsent ? 0.0 : static_cast<double>(stats.activity_count(idx));
  const double denominator = alpha * static_cast<double>(n + 1) + observed;
  for (std::size_t b = 0; b <= n; ++b) {
    double count = 0.0;
    if (idx != kAbsent) {
      count = static_cast<double>(follow ? stats.follow_count(idx, b) : stats.precede_count(idx, b));
    }
    v.entries[b] = (alpha + count) / denominator;
  }
  return v;
}

}  // namespace

std::optional<std::size_t> FollowStats::index_of(ActivityId a) const {
  if (a >= slot_.size() || slot_[a] == kAbsent) return std::nullopt;
  return slot_[a];
}

std::uint64_t FollowStats::follow_count(ActivityId a, ActivityId b) const {
  auto ia = index_of(a);
  if (!ia) return 0;
  if (b == kEndSentinel) return follow_count(*ia, size());
  auto ib = index_of(b);
  return ib ? follow_count(*ia, *ib) : 0;
}

std::uint64_t FollowStats::precede_count(ActivityId a, ActivityId b) const {
  auto ia = index_of(a);
  if (!ia) return 0;
  if (b == kStartSentinel) return precede_count(*ia, size());
  auto ib = index_of(b);
  return ib ? precede_count(*ia, *ib) : 0;
}

FollowStats build_follow_stats(const EventLog& log, std::optional<ActivityId> excluded) {
  FollowStats stats;
  const auto counts = log.activity_counts();
  stats.slot_.assign(log.alphabet().size(), kAbsent);
  for (ActivityId a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0 || (excluded && *excluded == a)) continue;
    stats.slot_[a] = stats.activities_.size();
    stats.activities_.push_back(a);
    stats.activity_count_.push_back(counts[a]);
  }
  const std::size_t n = stats.activities_.size();
  const std::size_t width = n + 1;
  stats.follow_.assign(n * width, 0);
  stats.precede_.assign(n * width, 0);

  for (const auto& [trace, count] : log.variants()) {
    std::size_t previous = n;  // start sentinel column
    for (ActivityId a : trace) {
      const std::size_t current = stats.slot_[a];
      if (current == kAbsent) continue;
      stats.precede_[current * width + previous] += count;
      if (previous != n) stats.follow_[previous * width + current] += count;
      previous = current;
    }
    if (previous != n) stats.follow_[previous * width + n] += count;
  }
  return stats;
}

DistributionVector dfr_vector(const FollowStats& stats, ActivityId a, double alpha) {
  return smoothed(stats, require_index(stats, a, alpha), alpha, true);
}

DistributionVector dpr_vector(const FollowStats& stats, ActivityId a, double alpha) {
  return smoothed(stats, require_index(stats, a, alpha), alpha, false);
}

double categorical_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double activity_entropy(const FollowStats& stats, ActivityId a, double alpha) {
  return categorical_entropy(dfr_vector(stats, a, alpha)) +
         categorical_entropy(dpr_vector(stats, a, alpha));
}

double log_entropy(const FollowStats& stats, double alpha) {
  double total = 0.0;
  for (ActivityId a : stats.activities()) total += activity_entropy(stats, a, alpha);
  return total;
}

double log_entropy(const EventLog& log, double alpha) {
  return log_entropy(build_follow_stats(log), alpha);
}

double adaptive_alpha(const FollowStats& stats) {
  return stats.size() == 0 ? 0.0 : 1.0 / static_cast<double>(stats.size());
}

EntropyReport entropy_report(const EventLog& log, double alpha) {
  const auto stats = build_follow_stats(log);
  EntropyReport report;
  report.alpha = alpha;
  for (ActivityId a : stats.activities()) {
    ActivityEntropy row;
    row.activity = log.name(a);
    row.h_dfr = categorical_entropy(dfr_vector(stats, a, alpha));
    row.h_dpr = categorical_entropy(dpr_vector(stats, a, alpha));
    row.h_total = row.h_dfr + row.h_dpr;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const EntropyReport& report) {
  std::string out = "activity,h_dfr,h_dpr,h_total,alpha\n";
  char buffer[160];
  for (const auto& row : report.rows) {
    std::snprintf(buffer, sizeof buffer, ",%.17g,%.17g,%.17g,%.17g\n", row.h_dfr, row.h_dpr,
                  row.h_total, report.alpha);
    out += csv_field(row.activity);
    out += buffer;
  }
  return out;
}

}  // namespace chaosmine
