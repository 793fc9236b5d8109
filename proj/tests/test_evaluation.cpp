#include <gtest/gtest.h>

#include "chaosmine/discovery.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/filters.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/synthesis.hpp"
#include "support.hpp"

using namespace chaosmine;
using chaosmine::testing::data_path;
using chaosmine::testing::random_log;
using chaosmine::testing::worked_log;

TEST(Replay, SequenceIsDeterministic) {
  auto result = replay_nondeterminism(parse_tree("seq(a,b,c)"), parse_variants("4×a,b,c\n"));
  EXPECT_EQ(result.nondeterminism, 1.0);
  EXPECT_EQ(result.fitness_fraction, 1.0);
  EXPECT_EQ(result.fitting_traces, 4u);
}

TEST(Replay, FlowerOverThreeActivities) {
  auto result = replay_nondeterminism(flower({"a", "b", "c"}), parse_variants("2×a,b,c\n1×c,c\n1×b\n"));
  EXPECT_DOUBLE_EQ(*result.nondeterminism, 3.0);
  EXPECT_EQ(result.fitness_fraction, 1.0);
}

TEST(Replay, ChoiceCountsBothBranches) {
  auto result = replay_nondeterminism(parse_tree("xor(a,b)"), parse_variants("1×a\n"));
  EXPECT_DOUBLE_EQ(*result.nondeterminism, 2.0);
}

TEST(Replay, ParallelAndOptionalSteps) {
  TreeReplayer par(parse_tree("par(a,b)"));
  EXPECT_EQ(*par.replay({"a", "b"}), (std::vector<std::size_t>{2, 1}));
  TreeReplayer skip(parse_tree("seq(xor(a,tau),b)"));
  // Choices are counted after the skip has fired.
  EXPECT_EQ(*skip.replay({"b"}), (std::vector<std::size_t>{1}));
  EXPECT_EQ(*skip.replay({"a", "b"}), (std::vector<std::size_t>{2, 1}));
  TreeReplayer loop(parse_tree("loop(a,b)"));
  EXPECT_EQ(*loop.replay({"a", "b", "a"}), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_FALSE(loop.accepts({"a", "b"}));
}

TEST(Replay, NonFittingTracesAreExcluded) {
  auto result = replay_nondeterminism(parse_tree("seq(a,b)"), parse_variants("3×a,b\n1×b,a\n"));
  EXPECT_DOUBLE_EQ(result.fitness_fraction, 0.75);
  EXPECT_EQ(result.nondeterminism, 1.0);
  auto none = replay_nondeterminism(parse_tree("seq(a,b)"), parse_variants("1×b\n"));
  EXPECT_FALSE(none.nondeterminism.has_value());
  EXPECT_EQ(none.fitness_fraction, 0.0);
}

TEST(Replay, AveragingModes) {
  // <a>: choices [2]; <b,c>: choices [2,1].
  auto tree = parse_tree("xor(a,seq(b,c))");
  auto log = parse_variants("1×a\n1×b,c\n");
  EXPECT_DOUBLE_EQ(*replay_nondeterminism(tree, log, Averaging::per_trace).nondeterminism, (2.0 + 1.5) / 2.0);
  EXPECT_DOUBLE_EQ(*replay_nondeterminism(tree, log, Averaging::pooled).nondeterminism, 5.0 / 3.0);
}

TEST(Replay, AcceptanceMatchesBoundedLanguage) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RandomTreeOptions options;
    options.activities = 4;
    auto tree = random_tree(seed, options);
    auto lang = bounded_language(tree, 6);
    TreeReplayer replayer(tree);
    for (const auto& word : bounded_language(flower({"t0", "t1", "t2", "t3"}), 4)) {
      EXPECT_EQ(replayer.accepts(word), lang.contains(word)) << format_tree(tree);
    }
  }
}

TEST(Replay, BoundedByOneAndFlower) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto log = random_log(seed);
    auto quality = evaluate_model(log);
    ASSERT_TRUE(quality.replay.nondeterminism.has_value());
    EXPECT_GE(*quality.replay.nondeterminism, 1.0);
    EXPECT_LE(*quality.replay.nondeterminism, quality.flower_baseline + 1e-12);
    EXPECT_DOUBLE_EQ(quality.flower_baseline, static_cast<double>(log.activities().size()));
  }
}

TEST(Curve, OneRecordPerStep) {
  auto log = worked_log();
  auto schedule = run_filter(log, {FilterKind::direct_entropy, false, std::nullopt});
  auto records = explained_activity_curve(log, schedule, {}, Averaging::per_trace, "worked");
  ASSERT_EQ(records.size(), 3u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].steps, i);
    EXPECT_EQ(records[i].log_id, "worked");
    EXPECT_EQ(records[i].method, "direct-entropy");
    EXPECT_EQ(records[i].fitness_fraction, 1.0);
    EXPECT_DOUBLE_EQ(records[i].explained_ratio, (4.0 - static_cast<double>(i)) / 4.0);
  }
  EXPECT_EQ(records[1].nondeterminism, 1.0);
  EXPECT_GT(*records[0].nondeterminism, 1.0);
  auto csv = to_csv(records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "log,method,steps,explained_ratio,nondeterminism,fitness_fraction,flower_baseline");
  EXPECT_NE(csv.find("\nworked,direct-entropy,1,0.75,1,1,3\n"), std::string::npos) << csv;
}

TEST(Curve, CleanFixtureIsRecoveredAfterRemovingChaos) {
  auto clean = read_log_file(data_path("logs/a12_25.variants")).log;
  auto clean_nd = *evaluate_model(clean).replay.nondeterminism;
  auto injected = inject_chaos(clean, {4, ChaosMode::uniform, chaos_cell_seed(7, 4, ChaosMode::uniform), "CHAOS_"});
  auto schedule = run_filter(injected.log, {FilterKind::direct_entropy, false, std::nullopt});
  auto records = explained_activity_curve(injected.log, schedule);
  EXPECT_NEAR(*records[4].nondeterminism, clean_nd, 1e-6);
}
