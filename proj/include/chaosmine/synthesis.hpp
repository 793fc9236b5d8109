#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chaosmine/event_log.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/process_tree.hpp"

namespace chaosmine {

// Random play-out of `tree`. Choices are uniform, parallel branches are merged
// by a uniformly random interleaving, and a loop repeats (redo, body) with
// probability `loop_continue_p` after each body. Empty play-outs are redrawn.
EventLog simulate(const ProcessTree& tree, std::size_t n_traces, std::uint64_t seed,
                  double loop_continue_p = 0.5);

// One random play-out; may be empty.
std::vector<std::string> play_out(const ProcessTree& tree, std::uint64_t seed,
                                  double loop_continue_p = 0.5);

enum class ChaosMode { frequent, infrequent, uniform };

std::string_view to_string(ChaosMode mode);
// Accepts "frequent"/"F", "infrequent"/"I", "uniform"/"U".
ChaosMode parse_chaos_mode(std::string_view text);
// "F", "I" or "U".
char mode_letter(ChaosMode mode);

struct ChaosInsertionSpec {
  std::size_t k = 1;
  ChaosMode mode = ChaosMode::uniform;
  std::uint64_t seed = 0;
  std::string name_prefix = "CHAOS_";
};

struct ChaosInjection {
  EventLog log;
  std::set<std::string> truth;
  std::map<std::string, std::uint64_t> inserted;  // events per chaotic activity
};

// Inserts k chaotic activities at uniformly random gap positions (with
// replacement, weighted by trace multiplicity). Event counts per chaotic
// activity follow `spec.mode`, using the min/max activity count of the input
// log as the shared baseline.
ChaosInjection inject_chaos(const EventLog& log, const ChaosInsertionSpec& spec);

struct ChaosReport {
  std::map<std::string, std::uint64_t> inserted;
  FilterSchedule schedule;
  // Ranking prefix walked until every chaotic activity was gone.
  std::vector<std::string> transcript;
  bool truth_retained = false;  // some chaotic activity survived to the final pair
  std::size_t incorrect_removals = 0;
};

// Runs `method` and counts the original activities removed before the last
// chaotic one. If a chaotic activity is among the two retained activities,
// every original activity counts as incorrectly removed.
ChaosReport score_filter_against_ground_truth(const EventLog& log_with_chaos,
                                              const std::set<std::string>& truth,
                                              const FilterMethod& method);

struct ChaosCell {
  std::string method;
  std::size_t k = 0;
  ChaosMode mode = ChaosMode::uniform;
  std::size_t incorrect_removals = 0;
};

struct ChaosGridOptions {
  std::vector<std::size_t> ks{1, 2, 4, 8};
  std::vector<ChaosMode> modes{ChaosMode::uniform, ChaosMode::frequent, ChaosMode::infrequent};
  std::vector<FilterMethod> methods = deterministic_methods();
  std::uint64_t seed = 0;
};

// Injection seed of one grid cell; shared by every method so all methods see
// the same chaotic log.
std::uint64_t chaos_cell_seed(std::uint64_t seed, std::size_t k, ChaosMode mode);

// Method × k × mode grid of incorrect removals, one cell per combination.
std::vector<ChaosCell> evaluate_chaos_grid(const EventLog& clean_log, const ChaosGridOptions& options);

// Wide CSV shaped like the published table: one row per method, one column
// per (k, mode) such as "1U,1F,1I,2U,...".
std::string chaos_grid_csv(const std::vector<ChaosCell>& cells, const ChaosGridOptions& options);

struct RandomTreeOptions {
  std::size_t activities = 8;
  double silent_leaf_p = 0.1;
  std::size_t max_children = 3;
};

// Random block-structured tree over distinct activity labels "t0", "t1", ...
ProcessTree random_tree(std::uint64_t seed, const RandomTreeOptions& options = {});

}  // namespace chaosmine
