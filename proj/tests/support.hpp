#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "chaosmine/event_log.hpp"
#include "chaosmine/log_io.hpp"
#include "chaosmine/random.hpp"

namespace chaosmine::testing {

inline std::string data_path(const std::string& relative) { return std::string(CHAOSMINE_DATA_DIR) + "/" + relative; }

inline EventLog worked_log() { return parse_variants("10×a,b,c,x\n10×a,b,x,c\n10×a,x,b,c\n"); }

// Random log over activities "a".."<a + alphabet - 1>".
inline EventLog random_log(std::uint64_t seed, std::size_t alphabet = 6, std::size_t variants = 8,
                           std::size_t max_length = 7) {
  Rng rng(seed);
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> traces;
  for (std::size_t v = 0; v < variants; ++v) {
    std::vector<std::string> trace;
    const auto length = rng.between(1, max_length);
    for (std::uint64_t i = 0; i < length; ++i) {
      trace.push_back(std::string(1, static_cast<char>('a' + rng.below(alphabet))));
    }
    traces.emplace_back(std::move(trace), rng.between(1, 5));
  }
  return EventLog::from_named(traces);
}

// Multiplicity-expanded named traces.
inline std::vector<std::vector<std::string>> expanded(const EventLog& log) {
  std::vector<std::vector<std::string>> out;
  for (const auto& [trace, count] : log.variants()) {
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(log.names_of(trace));
  }
  return out;
}

// Reference entropy straight from bigram counts of the expanded traces.
inline double oracle_activity_entropy(const EventLog& log, const std::string& a, double alpha) {
  std::map<std::string, double> after;
  std::map<std::string, double> before;
  double total = 0.0;
  std::map<std::string, int> seen;
  for (const auto& trace : expanded(log)) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      seen[trace[i]] = 1;
      if (trace[i] != a) continue;
      total += 1.0;
      after[i + 1 < trace.size() ? trace[i + 1] : "<end>"] += 1.0;
      before[i > 0 ? trace[i - 1] : "<start>"] += 1.0;
    }
  }
  const double categories = static_cast<double>(seen.size()) + 1.0;
  auto entropy = [&](const std::map<std::string, double>& counts) {
    double h = 0.0;
    double observed_mass = 0.0;
    for (const auto& [b, c] : counts) {
      const double p = (alpha + c) / (alpha * categories + total);
      observed_mass += 1.0;
      if (p > 0.0) h -= p * std::log2(p);
    }
    const double unseen = categories - observed_mass;
    if (alpha > 0.0 && unseen > 0.0) {
      const double p = alpha / (alpha * categories + total);
      h -= unseen * p * std::log2(p);
    }
    return h;
  };
  return entropy(after) + entropy(before);
}

}  // namespace chaosmine::testing
