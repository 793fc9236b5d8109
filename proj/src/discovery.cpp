#include "chaosmine/discovery.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "chaosmine/error.hpp"

namespace chaosmine {

namespace {

using SubLog = std::map<Trace, std::uint64_t>;

// Directed graph over the activities of one sublog, addressed by local index.
struct LocalGraph {
  std::vector<ActivityId> ids;  // local -> activity id, ascending
  std::vector<std::vector<bool>> edge;
  std::vector<bool> is_start;
  std::vector<bool> is_end;

  std::size_t size() const { return ids.size(); }
  std::size_t local(ActivityId a) const {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), a) - ids.begin());
  }
};

LocalGraph make_graph(const SubLog& log, double filter_ratio) {
  LocalGraph g;
  for (const auto& [trace, count] : log) g.ids.insert(g.ids.end(), trace.begin(), trace.end());
  std::sort(g.ids.begin(), g.ids.end());
  g.ids.erase(std::unique(g.ids.begin(), g.ids.end()), g.ids.end());
  const std::size_t n = g.size();

  std::vector<std::vector<std::uint64_t>> weight(n, std::vector<std::uint64_t>(n, 0));
  g.is_start.assign(n, false);
  g.is_end.assign(n, false);
  std::vector<std::uint64_t> ending(n, 0);
  for (const auto& [trace, count] : log) {
    if (trace.empty()) continue;
    g.is_start[g.local(trace.front())] = true;
    g.is_end[g.local(trace.back())] = true;
    ending[g.local(trace.back())] += count;
    for (std::size_t i = 1; i < trace.size(); ++i) weight[g.local(trace[i - 1])][g.local(trace[i])] += count;
  }
  g.edge.assign(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    // Ending a trace competes with the outgoing edges.
    const std::uint64_t heaviest = std::max(ending[a], *std::max_element(weight[a].begin(), weight[a].end()));
    for (std::size_t b = 0; b < n; ++b) {
      if (weight[a][b] == 0) continue;
      if (filter_ratio > 0.0 && static_cast<double>(weight[a][b]) < filter_ratio * static_cast<double>(heaviest)) {
        continue;
      }
      g.edge[a][b] = true;
    }
  }
  return g;
}

// Union-find over local indices.
struct Partition {
  std::vector<std::size_t> parent;
  explicit Partition(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Groups ordered by their smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < parent.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.front() < r.front(); });
    return out;
  }
};

std::vector<std::vector<bool>> reachability(const LocalGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < n; ++y) {
        if (g.edge[x][y] && !reach[s][y]) {
          reach[s][y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return reach;
}

using Cut = std::vector<std::vector<std::size_t>>;

std::optional<Cut> exclusive_choice_cut(const LocalGraph& g) {
  Partition p(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = 0; b < g.size(); ++b) {
      if (g.edge[a][b]) p.unite(a, b);
    }
  }
  auto groups = p.groups();
  if (groups.size() < 2) return std::nullopt;
  return groups;
}

std::optional<Cut> sequence_cut(const LocalGraph& g) {
  const std::size_t n = g.size();
  const auto reach = reachability(g);
  Partition p(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const bool mutual = reach[a][b] && reach[b][a];
      const bool unrelated = !reach[a][b] && !reach[b][a];
      if (mutual || unrelated) p.unite(a, b);
    }
  }
  // Coarsen until every pair of groups is strictly and completely ordered.
  while (true) {
    auto groups = p.groups();
    if (groups.size() < 2) return std::nullopt;
    auto before = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
      for (std::size_t a : x) {
        for (std::size_t b : y) {
          if (!reach[a][b] || reach[b][a]) return false;
        }
      }
      return true;
    };
    std::optional<std::pair<std::size_t, std::size_t>> conflict;
    for (std::size_t i = 0; i < groups.size() && !conflict; ++i) {
      for (std::size_t j = i + 1; j < groups.size() && !conflict; ++j) {
        if (!before(groups[i], groups[j]) && !before(groups[j], groups[i])) conflict = {{i, j}};
      }
    }
    if (conflict) {
      p.unite(groups[conflict->first].front(), groups[conflict->second].front());
      continue;
    }
    std::sort(groups.begin(), groups.end(),
              [&](const auto& x, const auto& y) { return before(x, y); });
    return groups;
  }
}

std::optional<Cut> parallel_cut(const LocalGraph& g) {
  const std::size_t n = g.size();
  Partition p(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!(g.edge[a][b] && g.edge[b][a])) p.unite(a, b);
    }
  }
  auto groups = p.groups();
  Cut complete;
  std::vector<std::size_t> deficient;
  for (auto& group : groups) {
    const bool has_start = std::any_of(group.begin(), group.end(), [&](std::size_t a) { return g.is_start[a]; });
    const bool has_end = std::any_of(group.begin(), group.end(), [&](std::size_t a) { return g.is_end[a]; });
    if (has_start && has_end) {
      complete.push_back(std::move(group));
    } else {
      deficient.insert(deficient.end(), group.begin(), group.end());
    }
  }
  if (complete.size() < 2) return std::nullopt;
  complete.front().insert(complete.front().end(), deficient.begin(), deficient.end());
  std::sort(complete.front().begin(), complete.front().end());
  return complete;
}

// First group is the body, the rest are redo components.
std::optional<Cut> loop_cut(const LocalGraph& g) {
  const std::size_t n = g.size();
  std::vector<bool> in_body(n, false);
  for (std::size_t a = 0; a < n; ++a) in_body[a] = g.is_start[a] || g.is_end[a];

  Partition p(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (g.edge[a][b] && !in_body[a] && !in_body[b]) p.unite(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> redo;
  for (auto& group : p.groups()) {
    if (!in_body[group.front()]) redo.push_back(std::move(group));
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = redo.begin(); it != redo.end();) {
      bool valid = true;
      for (std::size_t c : *it) {
        bool from_some_end = false;
        bool from_all_ends = true;
        bool to_some_start = false;
        bool to_all_starts = true;
        for (std::size_t x = 0; x < n; ++x) {
          if (!in_body[x]) continue;
          if (g.edge[x][c]) {
            if (!g.is_end[x]) valid = false;
            from_some_end = true;
          } else if (g.is_end[x]) {
            from_all_ends = false;
          }
          if (g.edge[c][x]) {
            if (!g.is_start[x]) valid = false;
            to_some_start = true;
          } else if (g.is_start[x]) {
            to_all_starts = false;
          }
        }
        if ((from_some_end && !from_all_ends) || (to_some_start && !to_all_starts)) valid = false;
      }
      if (valid) {
        ++it;
        continue;
      }
      for (std::size_t c : *it) in_body[c] = true;
      it = redo.erase(it);
      changed = true;
    }
  }
  if (redo.empty()) return std::nullopt;
  Cut cut;
  cut.emplace_back();
  for (std::size_t a = 0; a < n; ++a) {
    if (in_body[a]) cut.front().push_back(a);
  }
  for (auto& group : redo) cut.push_back(std::move(group));
  return cut;
}

// Maps activity id -> part index for a cut over `g`.
std::map<ActivityId, std::size_t> membership(const LocalGraph& g, const Cut& cut) {
  std::map<ActivityId, std::size_t> part;
  for (std::size_t i = 0; i < cut.size(); ++i) {
    for (std::size_t local : cut[i]) part[g.ids[local]] = i;
  }
  return part;
}

class Miner {
 public:
  Miner(const EventLog& log, const DiscoveryConfig& config) : log_(log), config_(config) {}

  ProcessTree mine(const SubLog& sublog) {
    std::uint64_t empty = 0;
    SubLog nonempty;
    for (const auto& [trace, count] : sublog) {
      if (trace.empty()) {
        empty += count;
      } else {
        nonempty.emplace(trace, count);
      }
    }
    if (nonempty.empty()) return ProcessTree::silent();
    if (empty > 0) return ProcessTree::choice({ProcessTree::silent(), mine(nonempty)});

    LocalGraph g = make_graph(nonempty, config_.edge_filter_ratio);
    if (g.size() == 1) {
      const bool singletons = std::all_of(nonempty.begin(), nonempty.end(),
                                          [](const auto& v) { return v.first.size() == 1; });
      ProcessTree leaf = ProcessTree::activity(log_.name(g.ids.front()));
      if (singletons) return leaf;
      return ProcessTree::loop(std::move(leaf), ProcessTree::silent());
    }

    if (auto cut = exclusive_choice_cut(g)) return split_choice(nonempty, g, *cut);
    if (auto cut = sequence_cut(g)) return split_sequence(nonempty, g, *cut);
    if (auto cut = parallel_cut(g)) return split_parallel(nonempty, g, *cut);
    if (auto cut = loop_cut(g)) return split_loop(nonempty, g, *cut);

    std::vector<std::string> names;
    for (ActivityId a : g.ids) names.push_back(log_.name(a));
    return flower(names);
  }

 private:
  static ProcessTree flattened(NodeKind kind, std::vector<ProcessTree> children) {
    if (children.size() == 1) return std::move(children.front());
    ProcessTree node;
    node.kind = kind;
    for (auto& child : children) {
      if (child.kind == kind) {
        for (auto& grandchild : child.children) node.children.push_back(std::move(grandchild));
      } else {
        node.children.push_back(std::move(child));
      }
    }
    return node;
  }

  ProcessTree split_choice(const SubLog& sublog, const LocalGraph& g, const Cut& cut) {
    const auto part = membership(g, cut);
    std::vector<SubLog> parts(cut.size());
    for (const auto& [trace, count] : sublog) {
      std::vector<std::size_t> hits(cut.size(), 0);
      for (ActivityId a : trace) ++hits[part.at(a)];
      const auto chosen = static_cast<std::size_t>(std::max_element(hits.begin(), hits.end()) - hits.begin());
      Trace kept;
      for (ActivityId a : trace) {
        if (part.at(a) == chosen) kept.push_back(a);
      }
      parts[chosen][kept] += count;
    }
    std::vector<ProcessTree> children;
    for (const auto& p : parts) {
      if (!p.empty()) children.push_back(mine(p));
    }
    return flattened(NodeKind::exclusive_choice, std::move(children));
  }

  ProcessTree split_sequence(const SubLog& sublog, const LocalGraph& g, const Cut& cut) {
    const auto part = membership(g, cut);
    std::vector<SubLog> parts(cut.size());
    for (const auto& [trace, count] : sublog) {
      std::vector<Trace> pieces(cut.size());
      std::size_t cursor = 0;
      for (ActivityId a : trace) {
        const std::size_t h = part.at(a);
        if (h < cursor) continue;  // only possible with edge filtering
        cursor = h;
        pieces[h].push_back(a);
      }
      for (std::size_t i = 0; i < cut.size(); ++i) parts[i][pieces[i]] += count;
    }
    std::vector<ProcessTree> children;
    for (const auto& p : parts) children.push_back(mine(p));
    return flattened(NodeKind::sequence, std::move(children));
  }

  ProcessTree split_parallel(const SubLog& sublog, const LocalGraph& g, const Cut& cut) {
    const auto part = membership(g, cut);
    std::vector<SubLog> parts(cut.size());
    for (const auto& [trace, count] : sublog) {
      std::vector<Trace> pieces(cut.size());
      for (ActivityId a : trace) pieces[part.at(a)].push_back(a);
      for (std::size_t i = 0; i < cut.size(); ++i) parts[i][pieces[i]] += count;
    }
    std::vector<ProcessTree> children;
    for (const auto& p : parts) children.push_back(mine(p));
    return flattened(NodeKind::parallel, std::move(children));
  }

  ProcessTree split_loop(const SubLog& sublog, const LocalGraph& g, const Cut& cut) {
    const auto part = membership(g, cut);
    SubLog body;
    SubLog redo;
    for (const auto& [trace, count] : sublog) {
      Trace segment;
      bool segment_is_body = true;
      bool expect_body = true;
      auto flush = [&] {
        if (segment_is_body) {
          body[segment] += count;
        } else {
          if (expect_body) body[Trace{}] += count;  // redo without a preceding body
          redo[segment] += count;
        }
        expect_body = !segment_is_body;
        segment.clear();
      };
      for (std::size_t i = 0; i < trace.size(); ++i) {
        const bool is_body = part.at(trace[i]) == 0;
        if (i > 0 && is_body != segment_is_body) flush();
        segment_is_body = is_body;
        segment.push_back(trace[i]);
      }
      flush();
      if (!segment_is_body) body[Trace{}] += count;  // trace ended inside a redo
    }
    return ProcessTree::loop(mine(body), mine(redo));
  }

  const EventLog& log_;
  DiscoveryConfig config_;
};

}  // namespace

std::uint64_t Dfg::edge(ActivityId from, ActivityId to) const {
  auto it = edges.find({from, to});
  return it == edges.end() ? 0 : it->second;
}

Dfg build_dfg(const EventLog& log) {
  Dfg dfg;
  dfg.names = log.alphabet();
  dfg.nodes = log.activities();
  for (const auto& [trace, count] : log.variants()) {
    dfg.start[trace.front()] += count;
    dfg.end[trace.back()] += count;
    for (std::size_t i = 1; i < trace.size(); ++i) dfg.edges[{trace[i - 1], trace[i]}] += count;
  }
  return dfg;
}

void DiscoveryConfig::validate() const {
  if (!(edge_filter_ratio >= 0.0 && edge_filter_ratio < 1.0)) {
    throw InvalidArgument("edge_filter_ratio must lie in [0, 1)");
  }
}

ProcessTree discover(const EventLog& log, const DiscoveryConfig& config) {
  config.validate();
  if (log.empty()) throw InvalidArgument("cannot discover a model from an empty log");
  Miner miner(log, config);
  return miner.mine(log.variants());
}

ProcessTree flower(const std::vector<std::string>& activities) {
  if (activities.empty()) throw InvalidArgument("the flower model needs at least one activity");
  if (activities.size() == 1) return ProcessTree::loop(ProcessTree::silent(), ProcessTree::activity(activities.front()));
  std::vector<ProcessTree> leaves;
  for (const auto& a : activities) leaves.push_back(ProcessTree::activity(a));
  return ProcessTree::loop(ProcessTree::silent(), ProcessTree::choice(std::move(leaves)));
}

}  // namespace chaosmine
