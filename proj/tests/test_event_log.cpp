#include <gtest/gtest.h>

#include <algorithm>

#include "chaosmine/error.hpp"
#include "chaosmine/event_log.hpp"
#include "chaosmine/log_io.hpp"
#include "support.hpp"

using namespace chaosmine;
using chaosmine::testing::random_log;

namespace {

Trace ids(const EventLog& log, std::initializer_list<const char*> names) {
  Trace t;
  for (const char* n : names) t.push_back(log.id(n));
  return t;
}

}  // namespace

TEST(EventLog, MergesIdenticalTracesIntoVariants) {
  auto log = EventLog::from_named({{{"a", "b", "c"}, 1}, {{"a", "b", "c"}, 1}, {{"b", "a", "c"}, 1}});
  EXPECT_EQ(log.variant_count(), 2u);
  EXPECT_EQ(log.trace_count(), 3u);
  EXPECT_EQ(log.event_count(), 9u);
  EXPECT_EQ(log.variants().at(ids(log, {"a", "b", "c"})), 2u);
  EXPECT_EQ(log.variants().at(ids(log, {"b", "a", "c"})), 1u);
}

TEST(EventLog, AlphabetIsCanonicalRegardlessOfInputOrder) {
  auto one = EventLog::from_named({{{"z", "b"}, 2}, {{"a"}, 1}});
  auto two = EventLog::from_named({{{"a"}, 1}, {{"z", "b"}, 2}});
  EXPECT_EQ(one.alphabet(), (std::vector<std::string>{"a", "b", "z"}));
  EXPECT_EQ(one, two);
  EXPECT_EQ(one.digest(), two.digest());
  EXPECT_EQ(one.digest().size(), 16u);
}

TEST(EventLog, DigestDistinguishesMultiplicity) {
  auto one = EventLog::from_named({{{"a", "b"}, 1}});
  auto two = EventLog::from_named({{{"a", "b"}, 2}});
  EXPECT_NE(one.digest(), two.digest());
}

TEST(EventLog, RejectsEmptyTracesZeroCountsAndReservedNames) {
  EXPECT_THROW(EventLog::from_named({{{}, 1}}), InvalidArgument);
  EXPECT_THROW(EventLog::from_named({{{"a"}, 0}}), InvalidArgument);
  EXPECT_THROW(EventLog::from_named({{{""}, 1}}), InvalidArgument);
  EXPECT_THROW(EventLog::from_named({{{std::string(kStartLabel)}, 1}}), InvalidArgument);
  EXPECT_THROW(EventLog::from_named({{{std::string(kEndLabel)}, 1}}), InvalidArgument);
}

TEST(EventLog, NamesAreCaseSensitive) {
  auto log = EventLog::from_named({{{"A_SUBMITTED", "a_submitted"}, 1}});
  EXPECT_EQ(log.alphabet().size(), 2u);
}

TEST(EventLog, UnknownNameLookupThrows) {
  auto log = EventLog::from_named({{{"a"}, 1}});
  EXPECT_FALSE(log.find("b").has_value());
  EXPECT_THROW(log.id("b"), InvalidArgument);
}

TEST(CountSubsequence, SingleActivityCountsMultiplicity) {
  auto log = parse_variants("2×a,b,c\n3×b,a,c\n");
  EXPECT_EQ(count_subsequence(ids(log, {"a"}), log), 5u);
}

TEST(CountSubsequence, PairCountsEveryOffset) {
  auto log = parse_variants("2×a,b,c\n3×b,a,c\n");
  EXPECT_EQ(count_subsequence(ids(log, {"a", "b"}), log), 2u);
}

TEST(CountSubsequence, OverlappingMatchesCount) {
  auto log = parse_variants("1×x,x,x\n");
  EXPECT_EQ(count_subsequence(ids(log, {"x", "x"}), log), 2u);
}

TEST(CountSubsequence, UnknownActivityOccursZeroTimes) {
  auto log = parse_variants("1×a\n");
  EXPECT_EQ(count_subsequence(Trace{12345}, log), 0u);
  EXPECT_THROW(count_subsequence(Trace{}, log), InvalidArgument);
}

TEST(Project, KeepsSubsequence) {
  auto log = parse_variants("1×a,b,c,a,b,c\n");
  auto projected = project_names(log, {"a", "c"});
  ASSERT_EQ(projected.variant_count(), 1u);
  EXPECT_EQ(projected.names_of(projected.variants().begin()->first),
            (std::vector<std::string>{"a", "c", "a", "c"}));
  EXPECT_EQ(projected.alphabet(), (std::vector<std::string>{"a", "c"}));
}

TEST(Project, FullAlphabetIsIdentity) {
  auto log = random_log(3);
  std::set<std::string> all(log.alphabet().begin(), log.alphabet().end());
  EXPECT_EQ(project_names(log, all), log);
}

TEST(Project, CollapsingVariantsSumMultiplicity) {
  auto log = parse_variants("1×a,b\n1×b,a\n");
  auto projected = project_names(log, {"b"});
  ASSERT_EQ(projected.variant_count(), 1u);
  EXPECT_EQ(projected.trace_count(), 2u);
}

TEST(Project, DropsEmptiedTracesAndReportsThem) {
  auto log = parse_variants("2×a\n1×a,b\n");
  auto result = project_counted(log, {log.id("b")});
  EXPECT_EQ(result.dropped_traces, 2u);
  EXPECT_EQ(result.log.trace_count(), 1u);
}

TEST(Project, UnknownIdThrows) {
  auto log = parse_variants("1×a\n");
  EXPECT_THROW(project(log, {ActivityId{99}}), InvalidArgument);
  EXPECT_THROW(project_names(log, {"zz"}), InvalidArgument);
}

TEST(ProjectProperty, EventCountAndIdempotence) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto log = random_log(seed);
    std::set<std::string> keep;
    Rng rng(seed + 1000);
    for (const auto& name : log.alphabet()) {
      if (rng.bernoulli(0.5)) keep.insert(name);
    }
    auto projected = project_names(log, keep);
    std::uint64_t expected_events = 0;
    for (const auto& name : keep) expected_events += count_subsequence(Trace{log.id(name)}, log);
    EXPECT_EQ(projected.event_count(), expected_events) << "seed " << seed;
    for (const auto& name : projected.activity_names()) EXPECT_TRUE(keep.contains(name));
    EXPECT_EQ(project_names(projected, std::set<std::string>(projected.alphabet().begin(),
                                                             projected.alphabet().end())),
              projected);
  }
}

TEST(CountSubsequenceProperty, SingletonEqualsOccurrenceSum) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto log = random_log(seed);
    const auto counts = log.activity_counts();
    for (ActivityId a : log.activities()) {
      std::uint64_t manual = 0;
      for (const auto& [trace, count] : log.variants()) {
        manual += count * static_cast<std::uint64_t>(std::count(trace.begin(), trace.end(), a));
      }
      EXPECT_EQ(count_subsequence(Trace{a}, log), manual);
      EXPECT_EQ(counts[a], manual);
    }
  }
}

TEST(Augment, EndAppendedAddsEndSentinel) {
  auto log = parse_variants("1×a,b\n");
  auto view = augment(log, AugmentMode::end_appended);
  std::vector<std::pair<Trace, std::uint64_t>> items(view.begin(), view.end());
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].first, (Trace{log.id("a"), log.id("b"), kEndSentinel}));
}

TEST(Augment, StartPrependedAddsStartSentinel) {
  auto log = parse_variants("1×a,b\n");
  auto view = augment(log, AugmentMode::start_prepended);
  std::vector<std::pair<Trace, std::uint64_t>> items(view.begin(), view.end());
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].first, (Trace{kStartSentinel, log.id("a"), log.id("b")}));
}

TEST(Augment, RemovingSentinelsRestoresTheLogAndNeverMutatesIt) {
  auto log = random_log(11);
  const auto before = log;
  for (auto mode : {AugmentMode::end_appended, AugmentMode::start_prepended}) {
    std::vector<std::pair<std::vector<std::string>, std::uint64_t>> restored;
    for (const auto& [trace, count] : augment(log, mode)) {
      std::vector<std::string> names;
      for (ActivityId a : trace) {
        if (a == kStartSentinel || a == kEndSentinel) continue;
        EXPECT_LT(a, log.alphabet().size());
        names.push_back(log.name(a));
      }
      restored.emplace_back(std::move(names), count);
    }
    EXPECT_EQ(EventLog::from_named(restored), log);
  }
  EXPECT_EQ(log, before);
}
