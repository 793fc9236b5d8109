#pragma once

#include <json.hpp>

#include "chaosmine/discovery.hpp"
#include "chaosmine/entropy.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/event_log.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/process_tree.hpp"

namespace chaosmine {

using Json = nlohmann::json;

// {"alphabet": [...], "variants": [{"trace": [...], "count": n}, ...]}
Json log_to_json(const EventLog& log);
EventLog log_from_json(const Json& value);

Json method_to_json(const FilterMethod& method);
FilterMethod method_from_json(const Json& value);

Json schedule_to_json(const FilterSchedule& schedule);
FilterSchedule schedule_from_json(const Json& value);

// Nested nodes: {"kind": "sequence", "children": [...]} and
// {"kind": "activity", "label": "a"}.
Json tree_to_json(const ProcessTree& tree);
ProcessTree tree_from_json(const Json& value);

// {"nodes": [{"activity", "count"}], "edges": [{"from", "to", "count"}],
//  "start": [{"activity", "count"}], "end": [...]}
Json dfg_to_json(const Dfg& dfg, const EventLog& log);

Json quality_to_json(const QualityRecord& record);
Json entropy_report_to_json(const EntropyReport& report);

// Compact canonical text (sorted keys, no insignificant whitespace).
std::string canonical_dump(const Json& value);

}  // namespace chaosmine
