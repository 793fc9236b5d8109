#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaosmine/event_log.hpp"

namespace chaosmine {

// Successor / predecessor counts of every occurring activity, taken on the
// end-appended and start-prepended views of a log.
//
// Activities are addressed by their dense position in `activities` (the
// consistent order used for every vector). Column `size()` of the follow
// matrix is the end sentinel; of the precede matrix the start sentinel.
class FollowStats {
 public:
  FollowStats() = default;

  const std::vector<ActivityId>& activities() const noexcept { return activities_; }
  std::size_t size() const noexcept { return activities_.size(); }
  std::optional<std::size_t> index_of(ActivityId a) const;

  std::uint64_t activity_count(std::size_t i) const { return activity_count_[i]; }
  // #(<a,b>, L^end); b == size() is the end sentinel.
  std::uint64_t follow_count(std::size_t a, std::size_t b) const { return follow_[a * (size() + 1) + b]; }
  // #(<b,a>, L^start); b == size() is the start sentinel.
  std::uint64_t precede_count(std::size_t a, std::size_t b) const { return precede_[a * (size() + 1) + b]; }

  std::uint64_t follow_count(ActivityId a, ActivityId b) const;
  std::uint64_t precede_count(ActivityId a, ActivityId b) const;

 private:
  friend FollowStats build_follow_stats(const EventLog&, std::optional<ActivityId>);

  std::vector<ActivityId> activities_;
  std::vector<std::size_t> slot_;  // ActivityId -> dense index, npos if absent
  std::vector<std::uint64_t> activity_count_;
  std::vector<std::uint64_t> follow_;
  std::vector<std::uint64_t> precede_;
};

// Counts on L, or on L projected without `excluded` when given (the projection
// is never materialized).
FollowStats build_follow_stats(const EventLog& log, std::optional<ActivityId> excluded = std::nullopt);

// Probabilities over Activities(L) ∪ {sentinel}, sentinel last.
struct DistributionVector {
  std::vector<double> entries;
};

DistributionVector dfr_vector(const FollowStats& stats, ActivityId a, double alpha = 0.0);
DistributionVector dpr_vector(const FollowStats& stats, ActivityId a, double alpha = 0.0);

// Shannon entropy in bits; 0·log 0 is taken as 0.
double categorical_entropy(std::span<const double> probabilities);
inline double categorical_entropy(const DistributionVector& v) { return categorical_entropy(v.entries); }

double activity_entropy(const FollowStats& stats, ActivityId a, double alpha = 0.0);

// Sum of activity entropies over Activities(L).
double log_entropy(const FollowStats& stats, double alpha = 0.0);
double log_entropy(const EventLog& log, double alpha = 0.0);

// 1 / |Activities(L)|, the per-iteration smoothing weight.
double adaptive_alpha(const FollowStats& stats);

struct ActivityEntropy {
  std::string activity;
  double h_dfr = 0.0;
  double h_dpr = 0.0;
  double h_total = 0.0;
};

struct EntropyReport {
  double alpha = 0.0;
  std::vector<ActivityEntropy> rows;
};

EntropyReport entropy_report(const EventLog& log, double alpha = 0.0);
// CSV with columns activity,h_dfr,h_dpr,h_total,alpha.
std::string to_csv(const EntropyReport& report);

}  // namespace chaosmine
