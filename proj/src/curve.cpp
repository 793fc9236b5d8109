#include <cstdio>
#include <sstream>

#include "chaosmine/error.hpp"
#include "chaosmine/evaluation.hpp"
#include "chaosmine/text.hpp"

namespace chaosmine {

namespace {

std::string number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

}  // namespace

ModelQuality evaluate_model(const EventLog& log, const DiscoveryConfig& config, Averaging averaging) {
  ModelQuality quality{discover(log, config), {}, 0.0};
  quality.replay = replay_nondeterminism(quality.tree, log, averaging);
  const auto baseline = replay_nondeterminism(flower(log.activity_names()), log, averaging);
  quality.flower_baseline = baseline.nondeterminism.value_or(0.0);
  return quality;
}

std::vector<QualityRecord> explained_activity_curve(const EventLog& log, const FilterSchedule& schedule,
                                                    const DiscoveryConfig& config, Averaging averaging,
                                                    const std::string& log_id) {
  const double total = static_cast<double>(log.activities().size());
  if (total == 0.0) throw InvalidArgument("cannot evaluate an empty log");
  std::vector<QualityRecord> records;
  for (std::size_t steps = 0; steps <= schedule.removal_order.size(); ++steps) {
    const EventLog filtered = materialize(log, schedule, steps);
    const ModelQuality quality = evaluate_model(filtered, config, averaging);
    QualityRecord record;
    record.log_id = log_id;
    record.method = schedule.method.label();
    record.steps = steps;
    record.explained_ratio = (total - static_cast<double>(steps)) / total;
    record.nondeterminism = quality.replay.nondeterminism;
    record.fitness_fraction = quality.replay.fitness_fraction;
    record.flower_baseline = quality.flower_baseline;
    records.push_back(std::move(record));
  }
  return records;
}

std::string to_csv(const std::vector<QualityRecord>& records) {
  std::ostringstream out;
  out << "log,method,steps,explained_ratio,nondeterminism,fitness_fraction,flower_baseline\n";
  for (const auto& r : records) {
    out << csv_field(r.log_id) << ',' << csv_field(r.method) << ',' << r.steps << ',' << number(r.explained_ratio)
        << ',' << (r.nondeterminism ? number(*r.nondeterminism) : "") << ',' << number(r.fitness_fraction) << ','
        << number(r.flower_baseline) << '\n';
  }
  return out.str();
}

}  // namespace chaosmine
