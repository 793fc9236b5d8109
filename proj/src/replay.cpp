#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include "chaosmine/error.hpp"
#include "chaosmine/evaluation.hpp"

namespace chaosmine {

TreeReplayer::TreeReplayer(const ProcessTree& tree) {
  tree.validate();
  const std::uint32_t source = new_point();
  const std::uint32_t sink = new_point();
  compile(tree, source, sink);
  initial_ = {source};
  final_ = {sink};
}

void TreeReplayer::compile(const ProcessTree& node, std::uint32_t in, std::uint32_t out) {
  switch (node.kind) {
    case NodeKind::activity:
      steps_.push_back({node.label, {in}, {out}});
      return;
    case NodeKind::silent:
      steps_.push_back({std::nullopt, {in}, {out}});
      return;
    case NodeKind::sequence: {
      std::uint32_t from = in;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const std::uint32_t to = i + 1 == node.children.size() ? out : new_point();
        compile(node.children[i], from, to);
        from = to;
      }
      return;
    }
    case NodeKind::exclusive_choice:
      for (const auto& child : node.children) compile(child, in, out);
      return;
    case NodeKind::parallel: {
      Step split{std::nullopt, {in}, {}};
      Step join{std::nullopt, {}, {out}};
      for (const auto& child : node.children) {
        const std::uint32_t start = new_point();
        const std::uint32_t end = new_point();
        split.produce.push_back(start);
        join.consume.push_back(end);
        compile(child, start, end);
      }
      steps_.push_back(std::move(split));
      steps_.push_back(std::move(join));
      return;
    }
    case NodeKind::loop: {
      const std::uint32_t before_body = new_point();
      const std::uint32_t after_body = new_point();
      steps_.push_back({std::nullopt, {in}, {before_body}});
      compile(node.children[0], before_body, after_body);
      compile(node.children[1], after_body, before_body);
      steps_.push_back({std::nullopt, {after_body}, {out}});
      return;
    }
  }
}

bool TreeReplayer::enabled(const Step& step, const ReplayState& state) const {
  return std::all_of(step.consume.begin(), step.consume.end(),
                     [&](std::uint32_t p) { return std::binary_search(state.begin(), state.end(), p); });
}

ReplayState TreeReplayer::fire(const Step& step, const ReplayState& state) const {
  ReplayState next;
  for (std::uint32_t p : state) {
    if (std::find(step.consume.begin(), step.consume.end(), p) == step.consume.end()) next.push_back(p);
  }
  next.insert(next.end(), step.produce.begin(), step.produce.end());
  std::sort(next.begin(), next.end());
  return next;
}

std::size_t TreeReplayer::visible_choices(const ReplayState& state) {
  if (auto it = choice_cache_.find(state); it != choice_cache_.end()) return it->second;
  std::set<std::string> labels;
  std::set<ReplayState> seen{state};
  std::vector<ReplayState> frontier{state};
  while (!frontier.empty()) {
    ReplayState current = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& step : steps_) {
      if (!enabled(step, current)) continue;
      if (step.label) {
        labels.insert(*step.label);
      } else {
        ReplayState next = fire(step, current);
        if (seen.insert(next).second) frontier.push_back(std::move(next));
      }
    }
  }
  choice_cache_.emplace(state, labels.size());
  return labels.size();
}

std::optional<std::vector<std::size_t>> TreeReplayer::replay(const std::vector<std::string>& trace) {
  // 0-1 shortest path over (events consumed, state): silent steps cost 1.
  using Node = std::pair<std::size_t, ReplayState>;
  struct Visit {
    std::size_t cost = std::numeric_limits<std::size_t>::max();
    std::optional<Node> parent;
    bool visible = false;
  };
  std::map<Node, Visit> visits;
  std::deque<Node> queue;
  const Node start{0, initial_};
  visits[start].cost = 0;
  queue.push_back(start);
  const Node goal{trace.size(), final_};

  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    const std::size_t cost = visits[node].cost;
    if (node == goal) break;
    for (const auto& step : steps_) {
      if (!enabled(step, node.second)) continue;
      const bool visible = step.label.has_value();
      if (visible && (node.first == trace.size() || *step.label != trace[node.first])) continue;
      Node next{node.first + (visible ? 1 : 0), fire(step, node.second)};
      const std::size_t next_cost = cost + (visible ? 0 : 1);
      auto& visit = visits[next];
      if (next_cost >= visit.cost) continue;
      visit = {next_cost, node, visible};
      if (visible) {
        queue.push_front(std::move(next));
      } else {
        queue.push_back(std::move(next));
      }
    }
  }

  auto found = visits.find(goal);
  if (found == visits.end()) return std::nullopt;
  std::vector<std::size_t> counts;
  const Node* cursor = &found->first;
  while (true) {
    const Visit& visit = visits.at(*cursor);
    if (!visit.parent) break;
    if (visit.visible) counts.push_back(visible_choices(visit.parent->second));
    cursor = &visits.find(*visit.parent)->first;
  }
  std::reverse(counts.begin(), counts.end());
  return counts;
}

bool accepts(const ProcessTree& tree, const std::vector<std::string>& trace) {
  TreeReplayer replayer(tree);
  return replayer.accepts(trace);
}

ReplayResult replay_nondeterminism(const ProcessTree& tree, const EventLog& log, Averaging averaging) {
  TreeReplayer replayer(tree);
  ReplayResult result;
  double weighted_sum = 0.0;
  double weight = 0.0;
  for (const auto& [trace, count] : log.variants()) {
    result.total_traces += count;
    auto counts = replayer.replay(log.names_of(trace));
    if (!counts) continue;
    result.fitting_traces += count;
    double sum = 0.0;
    for (std::size_t c : *counts) sum += static_cast<double>(c);
    if (averaging == Averaging::per_trace) {
      weighted_sum += static_cast<double>(count) * sum / static_cast<double>(counts->size());
      weight += static_cast<double>(count);
    } else {
      weighted_sum += static_cast<double>(count) * sum;
      weight += static_cast<double>(count) * static_cast<double>(counts->size());
    }
  }
  if (result.total_traces > 0) {
    result.fitness_fraction = static_cast<double>(result.fitting_traces) / static_cast<double>(result.total_traces);
  }
  if (weight > 0.0) result.nondeterminism = weighted_sum / weight;
  return result;
}

}  // namespace chaosmine
