// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "chaosmine/discovery.hpp"
#include "chaosmine/entropy.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/random.hpp"
#include "chaosmine/synthesis.hpp"

using namespace chaosmine;

namespace {

constexpr double kWorkedTolerance = 1e-3;
constexpr double kRecoveryTolerance = 1e-6;
constexpr double kNormalizationTolerance = 1e-9;
constexpr double kGridTimeLimitSeconds = 60.0;

constexpr std::uint64_t kFixtureSeed = 7;  // simulation seed of the bundled 25-trace log
constexpr std::uint64_t kGridSeed = 7;
constexpr std::uint64_t kMinerSeed = 1000;
constexpr std::uint64_t kStatisticsSeed = 4242;
constexpr std::uint64_t kNormalizationSeed = 31337;

std::string data_path(const std::string& relative) { return std::string(CHAOSMINE_DATA_DIR) + "/" + relative; }

struct Outcome {
  bool pass = true;
  std::string problems;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (condition) return;
    if (!pass) problems += "; ";
    pass = false;
    problems += what;
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& check) {
  Outcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    check(outcome);
  } catch (const std::exception& e) {
    outcome.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!outcome.pass) ++failures;
  std::printf("%s %s (%.2fs): %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), seconds,
              (outcome.pass ? outcome.detail.str() : outcome.problems).c_str());
  std::fflush(stdout);
}

EventLog worked_log() { return parse_variants("10×a,b,c,x\n10×a,b,x,c\n10×a,x,b,c\n"); }

EventLog a12_fixture() { return read_log_file(data_path("logs/a12_25.variants")).log; }

ProcessTree a12_tree() { return parse_tree(read_file(data_path("trees/a12.tree"))); }

EventLog random_log(Rng& rng) {
  const std::size_t alphabet = 3 + rng.below(8);
  const std::size_t variants = 1 + rng.below(12);
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> traces;
  for (std::size_t v = 0; v < variants; ++v) {
    std::vector<std::string> trace;
    const auto length = rng.between(1, 10);
    for (std::uint64_t i = 0; i < length; ++i) trace.push_back("act" + std::to_string(rng.below(alphabet)));
    traces.emplace_back(std::move(trace), rng.between(1, 20));
  }
  return EventLog::from_named(traces);
}

void worked_example(Outcome& out) {
  const auto log = worked_log();
  const auto stats = build_follow_stats(log);
  const std::vector<std::pair<std::string, double>> expected{{"a", 0.918}, {"b", 1.837}, {"c", 1.837}, {"x", 3.170}};
  for (const auto& [name, value] : expected) {
    const double h = activity_entropy(stats, log.id(name));
    out.require(std::fabs(h - value) <= kWorkedTolerance, "H(" + name + ")=" + std::to_string(h));
    out.detail << "H(" << name << ")=" << h << " ";
  }
  const auto schedule = run_filter(log, {FilterKind::direct_entropy, false, std::nullopt});
  out.require(!schedule.removal_order.empty() && schedule.removal_order[0].activity == "x",
              "direct-entropy did not remove x first");
  out.detail << "first removal=" << schedule.removal_order.at(0).activity;
}

void table_pattern(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto clean = a12_fixture();
  out.require(clean.activities().size() == 12 && clean.trace_count() == 25, "fixture is not 12 activities x 25 traces");
  out.require(clean == simulate(a12_tree(), 25, kFixtureSeed), "fixture differs from its simulation");
  ChaosGridOptions options;
  options.seed = kGridSeed;
  const auto cells = evaluate_chaos_grid(clean, options);
  std::size_t checked = 0;
  for (const auto& cell : cells) {
    const std::string where = cell.method + " " + std::to_string(cell.k) + mode_letter(cell.mode);
    const bool entropy = cell.method.find("entropy") != std::string::npos;
    if (entropy) {
      out.require(cell.incorrect_removals == 0, where + "=" + std::to_string(cell.incorrect_removals));
      ++checked;
    } else if (cell.method == "least-frequent-first" && cell.mode == ChaosMode::frequent) {
      out.require(cell.incorrect_removals == 12, where + "=" + std::to_string(cell.incorrect_removals));
      ++checked;
    } else if (cell.method == "most-frequent-first" && cell.mode == ChaosMode::infrequent) {
      out.require(cell.incorrect_removals == 12, where + "=" + std::to_string(cell.incorrect_removals));
      ++checked;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(checked == 4 * 4 * 3 + 2 * 4, "unexpected grid size");
  out.require(seconds < kGridTimeLimitSeconds, "grid took " + std::to_string(seconds) + "s");
  out.detail << checked << " pattern cells hold over " << cells.size() << " cells";
}

void nondeterminism_recovery(Outcome& out) {
  const auto clean = a12_fixture();
  const auto clean_quality = evaluate_model(clean);
  out.require(clean_quality.replay.nondeterminism.has_value(), "clean log has no fitting trace");
  const double target = *clean_quality.replay.nondeterminism;
  const auto injected =
      inject_chaos(clean, {4, ChaosMode::uniform, chaos_cell_seed(kGridSeed, 4, ChaosMode::uniform), "CHAOS_"});

  auto curve_for = [&](FilterKind kind) {
    const auto schedule = run_filter(injected.log, {kind, false, std::nullopt});
    return explained_activity_curve(injected.log, schedule);
  };
  const auto direct = curve_for(FilterKind::direct_entropy);
  const auto lff = curve_for(FilterKind::least_frequent_first);

  auto close = [&](const QualityRecord& r) {
    return r.nondeterminism && std::fabs(*r.nondeterminism - target) <= kRecoveryTolerance;
  };
  out.require(direct.size() > 4 && close(direct[4]), "direct-entropy curve misses the clean value at step 4");
  for (std::size_t step = 0; step < 4; ++step) {
    out.require(!close(direct[step]), "direct-entropy reaches the clean value early, at step " + std::to_string(step));
  }
  for (std::size_t step = 0; step <= 4 && step < lff.size(); ++step) {
    out.require(!close(lff[step]), "least-frequent-first reaches the clean value at step " + std::to_string(step));
  }
  out.detail << "clean=" << target << " direct[4]=" << direct.at(4).nondeterminism.value_or(NAN)
             << " lff[4]=" << lff.at(4).nondeterminism.value_or(NAN);
}

void miner_guarantee(Outcome& out) {
  std::size_t fitting = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t seed = derive_seed(kMinerSeed, i);
    RandomTreeOptions options;
    options.activities = 4 + static_cast<std::size_t>(seed % 9);
    const auto source = random_tree(seed, options);
    const auto log = simulate(source, 100, seed);
    const auto tree = discover(log);
    const double fitness = replay_nondeterminism(tree, log).fitness_fraction;
    out.require(fitness == 1.0, format_tree(source) + " fitness " + std::to_string(fitness));
    if (fitness == 1.0) ++fitting;
  }
  std::size_t rediscovered = 0;
  const std::vector<ProcessTree> fixtures{a12_tree(), parse_tree("seq(a,xor(b,c),d)"), parse_tree("par(a,seq(b,c))"),
                                          parse_tree("loop(seq(a,b),c)"), parse_tree("seq(xor(a,b),par(c,d),e)")};
  for (const auto& source : fixtures) {
    const auto log = simulate(source, 500, kFixtureSeed);
    const auto tree = discover(log);
    const bool same = bounded_language(source, 12) == bounded_language(tree, 12);
    out.require(same, "language differs for " + format_tree(source) + " -> " + format_tree(tree));
    if (same) ++rediscovered;
  }
  out.detail << fitting << "/50 random trees fit; " << rediscovered << "/" << fixtures.size()
             << " fixtures rediscovered up to length 12";
}

void statistics_oracles(Outcome& out) {
  Rng rng(kStatisticsSeed);
  std::size_t matched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RankMatrix matrix;
    for (int i = 0; i < 4; ++i) matrix.methods.push_back("m" + std::to_string(i));
    for (int j = 0; j < 5; ++j) matrix.logs.push_back("l" + std::to_string(j));
    std::vector<std::vector<double>> raw(4, std::vector<double>(5));
    for (auto& row : raw) {
      for (auto& v : row) v = static_cast<double>(rng.below(5));
      matrix.values.emplace_back(row.begin(), row.end());
    }
    std::vector<std::uint64_t> brute(4, 0);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 4; ++k) brute[i] += raw[i][j] < raw[k][j] ? 1 : 0;
      }
    }
    if (winning_number(matrix).totals == brute) ++matched;
  }
  out.require(matched == 100, std::to_string(matched) + "/100 winning-number matrices match");

  std::vector<std::string> ten;
  for (int i = 0; i < 10; ++i) ten.push_back("item" + std::to_string(i));
  auto reversed = ten;
  std::reverse(reversed.begin(), reversed.end());
  const auto same = kendall_tau_b(ten, ten);
  const auto opposite = kendall_tau_b(ten, reversed);
  const auto pair = kendall_tau_b(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
  out.require(same.tau_b == 1.0, "identical rankings tau != 1");
  out.require(opposite.tau_b == -1.0, "reversed rankings tau != -1");
  out.require(pair.tau_b && std::fabs(*pair.tau_b - 2.0 / 3.0) < 1e-12, "4-item pair tau != 2/3");
  out.require(same.reject, "identical 10-item rankings not rejected");

  int not_rejected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = ten;
    auto b = ten;
    for (auto* v : {&a, &b}) {
      for (std::size_t i = v->size(); i > 1; --i) std::swap((*v)[i - 1], (*v)[rng.below(i)]);
    }
    if (!kendall_tau_b(a, b).reject) ++not_rejected;
  }
  out.require(not_rejected >= 90, std::to_string(not_rejected) + "/100 independent shuffles not rejected");
  out.detail << matched << "/100 matrices; tau 1/-1/" << *pair.tau_b << "; p(identical)=" << *same.p << "; "
             << not_rejected << "/100 shuffles not rejected";
}

void normalization_suite(Outcome& out) {
  Rng rng(kNormalizationSeed);
  std::size_t vectors = 0;
  double worst = 0.0;
  std::size_t schedules = 0;
  std::size_t round_trips = 0;
  for (int i = 0; i < 200; ++i) {
    const auto log = random_log(rng);
    const auto stats = build_follow_stats(log);
    for (ActivityId a : stats.activities()) {
      for (double alpha : {0.0, adaptive_alpha(stats)}) {
        for (const auto& v : {dfr_vector(stats, a, alpha), dpr_vector(stats, a, alpha)}) {
          const double sum = std::accumulate(v.entries.begin(), v.entries.end(), 0.0);
          worst = std::max(worst, std::fabs(sum - 1.0));
          ++vectors;
        }
      }
    }

    const auto injected = inject_chaos(log, {1 + rng.below(4), static_cast<ChaosMode>(rng.below(3)), rng.next(), "CHAOS_"});
    const auto names = log.activity_names();
    const bool recovered = project_names(injected.log, {names.begin(), names.end()}) == log;
    out.require(recovered, "projection round trip failed on log " + std::to_string(i));
    if (recovered) ++round_trips;

    const std::size_t n = log.activities().size();
    for (const auto& method : all_methods(rng.next())) {
      const auto schedule = run_filter(log, method);
      const std::size_t expected = n >= 3 ? n - 2 : 0;
      const bool ok = schedule.removal_order.size() == expected && full_ranking(schedule).size() == n;
      out.require(ok, method.label() + " schedule has " + std::to_string(schedule.removal_order.size()) +
                          " removals for " + std::to_string(n) + " activities");
      if (ok) ++schedules;
    }
  }
  out.require(worst <= kNormalizationTolerance, "vector sum off by " + std::to_string(worst));
  out.detail << vectors << " vectors, max |sum-1|=" << worst << "; " << round_trips << "/200 round trips; "
             << schedules << " schedules with |A|-2 removals";
}

}  // namespace

int main() {
  criterion("worked-example exactness", worked_example);
  criterion("chaos grid pattern on the 12-activity fixture", table_pattern);
  criterion("nondeterminism recovery after removing 4 uniform chaotic activities", nondeterminism_recovery);
  criterion("miner fitness and rediscovery", miner_guarantee);
  criterion("statistics oracles", statistics_oracles);
  criterion("normalization suite", normalization_suite);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
