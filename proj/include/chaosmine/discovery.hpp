#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chaosmine/event_log.hpp"
#include "chaosmine/process_tree.hpp"

namespace chaosmine {

// Directly-follows graph of a log, multiplicity-weighted. Ids refer to the
// source log's alphabet (`names`).
struct Dfg {
  std::vector<std::string> names;
  std::vector<ActivityId> nodes;
  std::map<std::pair<ActivityId, ActivityId>, std::uint64_t> edges;
  std::map<ActivityId, std::uint64_t> start;
  std::map<ActivityId, std::uint64_t> end;

  std::uint64_t edge(ActivityId from, ActivityId to) const;
};

Dfg build_dfg(const EventLog& log);

struct DiscoveryConfig {
  // Edges lighter than ratio × (heaviest outgoing weight of their source, with
  // trace ends counted as an outgoing edge) are ignored during cut detection.
  // 0 keeps every edge.
  double edge_filter_ratio = 0.0;

  void validate() const;
};

// Recursive cut discovery: exclusive choice, sequence, parallel and loop cuts
// are tried in that order; when none applies the flower model over the
// current activities is returned. With edge_filter_ratio == 0 every trace of
// the input is accepted by the result.
ProcessTree discover(const EventLog& log, const DiscoveryConfig& config = {});

// loop(tau, xor(a, b, ...)): every sequence over `activities`.
ProcessTree flower(const std::vector<std::string>& activities);

}  // namespace chaosmine
