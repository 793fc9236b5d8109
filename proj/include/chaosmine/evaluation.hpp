#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaosmine/discovery.hpp"
#include "chaosmine/event_log.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/process_tree.hpp"

namespace chaosmine {

// Execution state of a compiled tree: the sorted set of marked control
// points. Parallel blocks hold one control point per running branch.
using ReplayState = std::vector<std::uint32_t>;

// A process tree compiled for replay. Each leaf becomes a step between two
// control points; parallel blocks and loops add silent routing steps.
class TreeReplayer {
 public:
  explicit TreeReplayer(const ProcessTree& tree);

  // Distinct visible labels that can fire as the next visible step from
  // `state`, silent steps taken freely.
  std::size_t visible_choices(const ReplayState& state);

  // For an accepted trace, the visible-choice count at the state right before
  // each of its events, following the run with the fewest silent steps.
  // nullopt when the trace is not accepted.
  std::optional<std::vector<std::size_t>> replay(const std::vector<std::string>& trace);

  bool accepts(const std::vector<std::string>& trace) { return replay(trace).has_value(); }

  const ReplayState& initial_state() const { return initial_; }

 private:
  struct Step {
    std::optional<std::string> label;  // nullopt for silent
    std::vector<std::uint32_t> consume;
    std::vector<std::uint32_t> produce;
  };

  std::uint32_t new_point() { return points_++; }
  void compile(const ProcessTree& node, std::uint32_t in, std::uint32_t out);
  bool enabled(const Step& step, const ReplayState& state) const;
  ReplayState fire(const Step& step, const ReplayState& state) const;

  std::vector<Step> steps_;
  std::uint32_t points_ = 0;
  ReplayState initial_;
  ReplayState final_;
  std::map<ReplayState, std::size_t> choice_cache_;
};

bool accepts(const ProcessTree& tree, const std::vector<std::string>& trace);

enum class Averaging {
  per_trace,  // mean per trace, then multiplicity-weighted mean over traces
  pooled,     // mean over every visible step of every fitting trace
};

struct ReplayResult {
  std::optional<double> nondeterminism;  // undefined when no trace fits
  double fitness_fraction = 0.0;
  std::uint64_t fitting_traces = 0;
  std::uint64_t total_traces = 0;
};

ReplayResult replay_nondeterminism(const ProcessTree& tree, const EventLog& log,
                                   Averaging averaging = Averaging::per_trace);

struct QualityRecord {
  std::string log_id;
  std::string method;
  std::size_t steps = 0;
  double explained_ratio = 1.0;
  std::optional<double> nondeterminism;
  double fitness_fraction = 0.0;
  double flower_baseline = 0.0;
};

// Discovers a model on `log` and replays `log` on it. The flower baseline is
// the nondeterminism of the flower model over the log's activities.
struct ModelQuality {
  ProcessTree tree;
  ReplayResult replay;
  double flower_baseline = 0.0;
};

ModelQuality evaluate_model(const EventLog& log, const DiscoveryConfig& config = {},
                            Averaging averaging = Averaging::per_trace);

// One record per step count 0..|removal_order|.
std::vector<QualityRecord> explained_activity_curve(const EventLog& log, const FilterSchedule& schedule,
                                                    const DiscoveryConfig& config = {},
                                                    Averaging averaging = Averaging::per_trace,
                                                    const std::string& log_id = "");

// CSV with columns log,method,steps,explained_ratio,nondeterminism,
// fitness_fraction,flower_baseline. Undefined nondeterminism is left empty.
std::string to_csv(const std::vector<QualityRecord>& records);

// values[i][j]: metric of method i on log j, lower is better. Missing cells are
// nullopt.
struct RankMatrix {
  std::vector<std::string> methods;
  std::vector<std::string> logs;
  std::vector<std::vector<std::optional<double>>> values;
};

struct WinningNumbers {
  std::vector<std::string> methods;
  std::vector<std::uint64_t> totals;
  std::vector<double> averages;  // totals / number of logs
};

// Counts, per method, the (log, rival) pairs where it is strictly better.
WinningNumbers winning_number(const RankMatrix& matrix);

struct KendallResult {
  std::optional<double> tau_b;  // undefined when either ranking is all ties
  std::optional<double> z;
  std::optional<double> p;      // two-sided
  bool reject = false;          // p < significance
};

// Rank correlation of two scorings of the same items (x[i] and y[i] belong to
// item i; equal values are ties). Significance from the normal approximation
// with tie-corrected variance.
KendallResult kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y,
                            double significance = 0.05);

// Kendall's tau between two orderings of the same items (position = rank).
KendallResult kendall_tau_b(const std::vector<std::string>& order1, const std::vector<std::string>& order2,
                            double significance = 0.05);

// Harmonic mean of fitness and precision; 0 when both are 0.
double f_score(double fitness, double precision);

}  // namespace chaosmine
