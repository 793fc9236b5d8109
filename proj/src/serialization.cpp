#include "chaosmine/serialization.hpp"

#include "chaosmine/error.hpp"

namespace chaosmine {

namespace {

template <typename F>
auto guarded(const char* what, F&& body) {
  try {
    return body();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
  }
}

Json step_to_json(const ScheduleStep& step) {
  return {{"activity", step.activity}, {"criterion", step.criterion}, {"alpha", step.alpha}};
}

ScheduleStep step_from_json(const Json& value) {
  return {value.at("activity").get<std::string>(), value.at("criterion").get<double>(),
          value.at("alpha").get<double>()};
}

std::string kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::sequence: return "sequence";
    case NodeKind::exclusive_choice: return "xor";
    case NodeKind::parallel: return "parallel";
    case NodeKind::loop: return "loop";
    case NodeKind::activity: return "activity";
    case NodeKind::silent: return "tau";
  }
  return "unknown";
}

NodeKind kind_from_name(const std::string& name) {
  for (NodeKind kind : {NodeKind::sequence, NodeKind::exclusive_choice, NodeKind::parallel, NodeKind::loop,
                        NodeKind::activity, NodeKind::silent}) {
    if (name == kind_name(kind) || name == keyword(kind)) return kind;
  }
  if (name == "exclusive_choice") return NodeKind::exclusive_choice;
  if (name == "silent") return NodeKind::silent;
  throw InvalidArgument("unknown tree node kind '" + name + "'");
}

Json counted(const std::map<ActivityId, std::uint64_t>& counts, const EventLog& log) {
  Json out = Json::array();
  for (const auto& [id, count] : counts) out.push_back({{"activity", log.name(id)}, {"count", count}});
  return out;
}

}  // namespace

Json log_to_json(const EventLog& log) {
  Json variants = Json::array();
  for (const auto& [trace, count] : log.variants()) {
    variants.push_back({{"trace", log.names_of(trace)}, {"count", count}});
  }
  return {{"alphabet", log.alphabet()}, {"variants", std::move(variants)}};
}

EventLog log_from_json(const Json& value) {
  return guarded("log", [&] {
    LogBuilder builder;
    for (const auto& name : value.at("alphabet")) builder.declare(name.get<std::string>());
    for (const auto& variant : value.at("variants")) {
      const auto trace = variant.at("trace").get<std::vector<std::string>>();
      const auto count = variant.at("count").get<std::uint64_t>();
      if (count == 0) throw InvalidArgument("variant counts must be positive");
      builder.add_trace(trace, count);
    }
    return std::move(builder).build();
  });
}

Json method_to_json(const FilterMethod& method) {
  Json out{{"kind", std::string(to_string(method.kind))}, {"laplace", method.laplace}};
  out["seed"] = method.seed ? Json(*method.seed) : Json(nullptr);
  return out;
}

FilterMethod method_from_json(const Json& value) {
  return guarded("filter method", [&] {
    FilterMethod method;
    method.kind = parse_filter_kind(value.at("kind").get<std::string>());
    method.laplace = value.value("laplace", false);
    if (value.contains("seed") && !value.at("seed").is_null()) method.seed = value.at("seed").get<std::uint64_t>();
    method.validate();
    return method;
  });
}

Json schedule_to_json(const FilterSchedule& schedule) {
  Json removal = Json::array();
  for (const auto& step : schedule.removal_order) removal.push_back(step_to_json(step));
  Json retained = Json::array();
  for (const auto& step : schedule.retained) retained.push_back(step_to_json(step));
  return {{"method", method_to_json(schedule.method)},
          {"label", schedule.method.label()},
          {"removal_order", std::move(removal)},
          {"retained", std::move(retained)},
          {"source_digest", schedule.source_digest},
          {"diagnostic", schedule.diagnostic}};
}

FilterSchedule schedule_from_json(const Json& value) {
  return guarded("schedule", [&] {
    FilterSchedule schedule;
    schedule.method = method_from_json(value.at("method"));
    for (const auto& step : value.at("removal_order")) schedule.removal_order.push_back(step_from_json(step));
    for (const auto& step : value.at("retained")) schedule.retained.push_back(step_from_json(step));
    schedule.source_digest = value.at("source_digest").get<std::string>();
    schedule.diagnostic = value.value("diagnostic", "");
    return schedule;
  });
}

Json tree_to_json(const ProcessTree& tree) {
  Json out{{"kind", kind_name(tree.kind)}};
  if (tree.kind == NodeKind::activity) out["label"] = tree.label;
  if (!tree.is_leaf()) {
    Json children = Json::array();
    for (const auto& child : tree.children) children.push_back(tree_to_json(child));
    out["children"] = std::move(children);
  }
  return out;
}

ProcessTree tree_from_json(const Json& value) {
  return guarded("process tree", [&] {
    ProcessTree tree;
    tree.kind = kind_from_name(value.at("kind").get<std::string>());
    if (tree.kind == NodeKind::activity) tree.label = value.at("label").get<std::string>();
    if (value.contains("children")) {
      for (const auto& child : value.at("children")) tree.children.push_back(tree_from_json(child));
    }
    tree.validate();
    return tree;
  });
}

Json dfg_to_json(const Dfg& dfg, const EventLog& log) {
  const auto counts = log.activity_counts();
  Json nodes = Json::array();
  for (ActivityId id : dfg.nodes) nodes.push_back({{"activity", log.name(id)}, {"count", counts[id]}});
  Json edges = Json::array();
  for (const auto& [edge, count] : dfg.edges) {
    edges.push_back({{"from", log.name(edge.first)}, {"to", log.name(edge.second)}, {"count", count}});
  }
  return {{"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"start", counted(dfg.start, log)},
          {"end", counted(dfg.end, log)}};
}

Json quality_to_json(const QualityRecord& record) {
  Json out{{"log", record.log_id},
           {"method", record.method},
           {"steps", record.steps},
           {"explained_ratio", record.explained_ratio},
           {"fitness_fraction", record.fitness_fraction},
           {"flower_baseline", record.flower_baseline}};
  out["nondeterminism"] = record.nondeterminism ? Json(*record.nondeterminism) : Json(nullptr);
  return out;
}

Json entropy_report_to_json(const EntropyReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"activity", row.activity}, {"h_dfr", row.h_dfr}, {"h_dpr", row.h_dpr}, {"h_total", row.h_total}});
  }
  return {{"alpha", report.alpha}, {"rows", std::move(rows)}};
}

std::string canonical_dump(const Json& value) { return value.dump(2) + "\n"; }

}  // namespace chaosmine
