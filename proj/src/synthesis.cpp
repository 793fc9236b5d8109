#include "chaosmine/synthesis.hpp"

#include <algorithm>

#include "chaosmine/error.hpp"
#include "chaosmine/random.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

constexpr std::size_t kMaxEmptyPlayOuts = 1000;

void play(const ProcessTree& node, Rng& rng, double loop_continue_p, std::vector<std::string>& out) {
  switch (node.kind) {
    case NodeKind::activity:
      out.push_back(node.label);
      return;
    case NodeKind::silent:
      return;
    case NodeKind::sequence:
      for (const auto& child : node.children) play(child, rng, loop_continue_p, out);
      return;
    case NodeKind::exclusive_choice:
      play(node.children[rng.below(node.children.size())], rng, loop_continue_p, out);
      return;
    case NodeKind::parallel: {
      std::vector<std::vector<std::string>> branches(node.children.size());
      std::size_t remaining = 0;
      for (std::size_t i = 0; i < branches.size(); ++i) {
        play(node.children[i], rng, loop_continue_p, branches[i]);
        remaining += branches[i].size();
      }
      // Picking a branch with probability proportional to its remaining
      // length draws every interleaving with equal probability.
      std::vector<std::size_t> next(branches.size(), 0);
      while (remaining > 0) {
        std::uint64_t r = rng.below(remaining);
        std::size_t b = 0;
        while (r >= branches[b].size() - next[b]) {
          r -= branches[b].size() - next[b];
          ++b;
        }
        out.push_back(branches[b][next[b]++]);
        --remaining;
      }
      return;
    }
    case NodeKind::loop:
      play(node.children[0], rng, loop_continue_p, out);
      while (rng.bernoulli(loop_continue_p)) {
        play(node.children[1], rng, loop_continue_p, out);
        play(node.children[0], rng, loop_continue_p, out);
      }
      return;
  }
}

void check_loop_probability(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("loop_continue_p must lie in [0, 1)");
}

ProcessTree grow(std::vector<std::string> labels, Rng& rng, const RandomTreeOptions& options) {
  if (labels.size() == 1) return ProcessTree::activity(std::move(labels.front()));

  static constexpr NodeKind kOperators[] = {NodeKind::sequence, NodeKind::exclusive_choice,
                                            NodeKind::parallel, NodeKind::loop};
  const NodeKind kind = kOperators[rng.below(4)];
  std::size_t parts = 2;
  if (kind != NodeKind::loop) {
    parts = static_cast<std::size_t>(
        rng.between(2, std::min<std::size_t>(std::max<std::size_t>(options.max_children, 2), labels.size())));
  }
  // Cut the label list at parts-1 distinct positions.
  std::vector<std::size_t> cuts;
  while (cuts.size() + 1 < parts) {
    const std::size_t c = 1 + rng.below(labels.size() - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(labels.size());

  ProcessTree tree;
  tree.kind = kind;
  std::size_t start = 0;
  for (std::size_t c : cuts) {
    std::vector<std::string> part(labels.begin() + static_cast<std::ptrdiff_t>(start),
                                  labels.begin() + static_cast<std::ptrdiff_t>(c));
    tree.children.push_back(grow(std::move(part), rng, options));
    start = c;
  }
  if (kind == NodeKind::exclusive_choice && rng.bernoulli(options.silent_leaf_p)) {
    tree.children.push_back(ProcessTree::silent());
  }
  if (kind == NodeKind::sequence && rng.bernoulli(options.silent_leaf_p)) {
    auto& optional_child = tree.children[rng.below(tree.children.size())];
    optional_child = ProcessTree::choice({std::move(optional_child), ProcessTree::silent()});
  }
  return tree;
}

}  // namespace

std::vector<std::string> play_out(const ProcessTree& tree, std::uint64_t seed, double loop_continue_p) {
  check_loop_probability(loop_continue_p);
  Rng rng(seed);
  std::vector<std::string> out;
  play(tree, rng, loop_continue_p, out);
  return out;
}

EventLog simulate(const ProcessTree& tree, std::size_t n_traces, std::uint64_t seed,
                  double loop_continue_p) {
  if (n_traces == 0) throw InvalidArgument("n_traces must be at least 1");
  check_loop_probability(loop_continue_p);
  tree.validate();
  Rng rng(seed);
  LogBuilder builder;
  std::vector<std::string> trace;
  for (std::size_t i = 0; i < n_traces; ++i) {
    std::size_t attempts = 0;
    do {
      if (attempts++ == kMaxEmptyPlayOuts) {
        throw InvalidArgument("tree produced " + std::to_string(kMaxEmptyPlayOuts) +
                              " empty play-outs in a row");
      }
      trace.clear();
      play(tree, rng, loop_continue_p, trace);
    } while (trace.empty());
    builder.add_trace(trace);
  }
  return std::move(builder).build();
}

std::string_view to_string(ChaosMode mode) {
  switch (mode) {
    case ChaosMode::frequent: return "frequent";
    case ChaosMode::infrequent: return "infrequent";
    case ChaosMode::uniform: return "uniform";
  }
  return "unknown";
}

char mode_letter(ChaosMode mode) {
  switch (mode) {
    case ChaosMode::frequent: return 'F';
    case ChaosMode::infrequent: return 'I';
    case ChaosMode::uniform: return 'U';
  }
  return '?';
}

ChaosMode parse_chaos_mode(std::string_view text) {
  for (auto mode : {ChaosMode::frequent, ChaosMode::infrequent, ChaosMode::uniform}) {
    if (text == to_string(mode) || (text.size() == 1 && text[0] == mode_letter(mode))) return mode;
  }
  throw InvalidArgument("unknown chaos mode '" + std::string(text) + "'");
}

ChaosInjection inject_chaos(const EventLog& log, const ChaosInsertionSpec& spec) {
  if (log.empty()) throw InvalidArgument("cannot inject chaos into an empty log");
  if (spec.k == 0) throw InvalidArgument("k must be at least 1");

  const auto counts = log.activity_counts();
  std::uint64_t lo = UINT64_MAX;
  std::uint64_t hi = 0;
  for (ActivityId a : log.activities()) {
    lo = std::min(lo, counts[a]);
    hi = std::max(hi, counts[a]);
  }

  std::vector<const Trace*> traces;
  std::vector<std::uint64_t> gap_end;  // cumulative gap counts
  std::uint64_t gaps = 0;
  for (const auto& [trace, count] : log.variants()) {
    for (std::uint64_t c = 0; c < count; ++c) {
      traces.push_back(&trace);
      gaps += trace.size() + 1;
      gap_end.push_back(gaps);
    }
  }

  ChaosInjection result;
  std::vector<std::string> chaotic;
  for (std::size_t counter = 1; chaotic.size() < spec.k; ++counter) {
    std::string name = spec.name_prefix + std::to_string(counter);
    if (!log.find(name)) chaotic.push_back(std::move(name));
  }

  Rng rng(spec.seed);
  // insertions[t] holds (gap, chaotic index) in draw order.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> insertions(traces.size());
  for (std::size_t c = 0; c < chaotic.size(); ++c) {
    std::uint64_t n = 0;
    switch (spec.mode) {
      case ChaosMode::frequent: n = hi; break;
      case ChaosMode::infrequent: n = lo; break;
      case ChaosMode::uniform: n = rng.between(lo, hi); break;
    }
    result.inserted[chaotic[c]] = n;
    result.truth.insert(chaotic[c]);
    for (std::uint64_t j = 0; j < n; ++j) {
      const std::uint64_t slot = rng.below(gaps);
      const auto t = static_cast<std::size_t>(
          std::upper_bound(gap_end.begin(), gap_end.end(), slot) - gap_end.begin());
      const std::uint64_t first = t == 0 ? 0 : gap_end[t - 1];
      insertions[t].emplace_back(static_cast<std::size_t>(slot - first), c);
    }
  }

  LogBuilder builder;
  for (ActivityId a = 0; a < log.alphabet().size(); ++a) builder.declare(log.name(a));
  std::vector<std::string> names;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    auto& pending = insertions[t];
    std::stable_sort(pending.begin(), pending.end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });
    names.clear();
    auto next = pending.begin();
    const Trace& trace = *traces[t];
    for (std::size_t gap = 0; gap <= trace.size(); ++gap) {
      for (; next != pending.end() && next->first == gap; ++next) names.push_back(chaotic[next->second]);
      if (gap < trace.size()) names.push_back(log.name(trace[gap]));
    }
    builder.add_trace(names);
  }
  result.log = std::move(builder).build();
  return result;
}

ChaosReport score_filter_against_ground_truth(const EventLog& log_with_chaos,
                                              const std::set<std::string>& truth,
                                              const FilterMethod& method) {
  if (truth.empty()) throw InvalidArgument("ground truth is empty");
  for (const auto& name : truth) log_with_chaos.id(name);

  ChaosReport report;
  const auto counts = log_with_chaos.activity_counts();
  for (const auto& name : truth) report.inserted[name] = counts[log_with_chaos.id(name)];
  report.schedule = run_filter(log_with_chaos, method);

  std::set<std::string> pending = truth;
  std::size_t originals_removed = 0;
  for (const auto& step : report.schedule.removal_order) {
    if (pending.empty()) break;
    report.transcript.push_back(step.activity);
    if (pending.erase(step.activity) == 0) ++originals_removed;
  }
  if (pending.empty()) {
    report.incorrect_removals = originals_removed;
  } else {
    report.truth_retained = true;
    for (const auto& step : report.schedule.retained) report.transcript.push_back(step.activity);
    std::size_t originals = 0;
    for (const auto& name : log_with_chaos.activity_names()) originals += truth.contains(name) ? 0 : 1;
    report.incorrect_removals = originals;
  }
  return report;
}

std::uint64_t chaos_cell_seed(std::uint64_t seed, std::size_t k, ChaosMode mode) {
  return derive_seed(seed, k, static_cast<std::uint64_t>(mode_letter(mode)));
}

std::vector<ChaosCell> evaluate_chaos_grid(const EventLog& clean_log, const ChaosGridOptions& options) {
  std::vector<ChaosCell> cells;
  for (std::size_t k : options.ks) {
    for (ChaosMode mode : options.modes) {
      ChaosInsertionSpec spec;
      spec.k = k;
      spec.mode = mode;
      spec.seed = chaos_cell_seed(options.seed, k, mode);
      const auto injected = inject_chaos(clean_log, spec);
      for (const auto& method : options.methods) {
        const auto report = score_filter_against_ground_truth(injected.log, injected.truth, method);
        cells.push_back({method.label(), k, mode, report.incorrect_removals});
      }
    }
  }
  return cells;
}

std::string chaos_grid_csv(const std::vector<ChaosCell>& cells, const ChaosGridOptions& options) {
  std::string out = "method";
  for (std::size_t k : options.ks) {
    for (ChaosMode mode : options.modes) out += "," + std::to_string(k) + mode_letter(mode);
  }
  out += '\n';
  for (const auto& method : options.methods) {
    out += csv_field(method.label());
    for (std::size_t k : options.ks) {
      for (ChaosMode mode : options.modes) {
        auto it = std::find_if(cells.begin(), cells.end(), [&](const ChaosCell& c) {
          return c.method == method.label() && c.k == k && c.mode == mode;
        });
        out += ',';
        if (it != cells.end()) out += std::to_string(it->incorrect_removals);
      }
    }
    out += '\n';
  }
  return out;
}

ProcessTree random_tree(std::uint64_t seed, const RandomTreeOptions& options) {
  if (options.activities == 0) throw InvalidArgument("a random tree needs at least one activity");
  Rng rng(seed);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < options.activities; ++i) labels.push_back("t" + std::to_string(i));
  for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
  return grow(std::move(labels), rng, options);
}

}  // namespace chaosmine
