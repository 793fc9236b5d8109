#include <cmath>
#include <map>
#include <set>

#include "chaosmine/error.hpp"
#include "chaosmine/evaluation.hpp"

namespace chaosmine {

namespace {

struct TieSums {
  double pairs = 0.0;   // Σ t(t-1)/2
  double cubic = 0.0;   // Σ t(t-1)(t-2)
  double linear = 0.0;  // Σ t(t-1)(2t+5)
};

TieSums tie_sums(const std::vector<double>& values) {
  std::map<double, double> groups;
  for (double v : values) groups[v] += 1.0;
  TieSums sums;
  for (const auto& [value, t] : groups) {
    sums.pairs += t * (t - 1.0) / 2.0;
    sums.cubic += t * (t - 1.0) * (t - 2.0);
    sums.linear += t * (t - 1.0) * (2.0 * t + 5.0);
  }
  return sums;
}

}  // namespace

WinningNumbers winning_number(const RankMatrix& matrix) {
  const std::size_t methods = matrix.methods.size();
  const std::size_t logs = matrix.logs.size();
  if (matrix.values.size() != methods) throw InvalidArgument("rank matrix needs one row per method");
  std::string holes;
  for (std::size_t i = 0; i < methods; ++i) {
    if (matrix.values[i].size() != logs) throw InvalidArgument("rank matrix is not rectangular");
    for (std::size_t j = 0; j < logs; ++j) {
      if (matrix.values[i][j]) continue;
      if (!holes.empty()) holes += ", ";
      holes += "(" + matrix.methods[i] + ", " + matrix.logs[j] + ")";
    }
  }
  if (!holes.empty()) throw InvalidArgument("rank matrix has missing cells: " + holes);
  if (logs == 0) throw InvalidArgument("rank matrix has no logs");

  WinningNumbers out;
  out.methods = matrix.methods;
  out.totals.assign(methods, 0);
  for (std::size_t j = 0; j < logs; ++j) {
    for (std::size_t i = 0; i < methods; ++i) {
      for (std::size_t k = 0; k < methods; ++k) {
        if (*matrix.values[i][j] < *matrix.values[k][j]) ++out.totals[i];
      }
    }
  }
  for (auto total : out.totals) out.averages.push_back(static_cast<double>(total) / static_cast<double>(logs));
  return out;
}

KendallResult kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y, double significance) {
  if (x.size() != y.size()) throw InvalidArgument("rankings differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("kendall tau needs at least two items");

  double concordant_minus_discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 || dy == 0.0) continue;
      concordant_minus_discordant += (dx > 0.0) == (dy > 0.0) ? 1.0 : -1.0;
    }
  }

  const double nd = static_cast<double>(n);
  const double total_pairs = nd * (nd - 1.0) / 2.0;
  const TieSums tx = tie_sums(x);
  const TieSums ty = tie_sums(y);
  KendallResult result;
  if (tx.pairs == total_pairs || ty.pairs == total_pairs) return result;

  result.tau_b = concordant_minus_discordant / std::sqrt((total_pairs - tx.pairs) * (total_pairs - ty.pairs));
  const double m = nd * (nd - 1.0);
  double variance = (m * (2.0 * nd + 5.0) - tx.linear - ty.linear) / 18.0 + 2.0 * tx.pairs * ty.pairs / m;
  if (n > 2) variance += tx.cubic * ty.cubic / (9.0 * m * (nd - 2.0));
  result.z = concordant_minus_discordant / std::sqrt(variance);
  result.p = std::erfc(std::fabs(*result.z) / std::sqrt(2.0));
  result.reject = *result.p < significance;
  return result;
}

KendallResult kendall_tau_b(const std::vector<std::string>& order1, const std::vector<std::string>& order2,
                            double significance) {
  std::map<std::string, double> position;
  for (std::size_t i = 0; i < order2.size(); ++i) {
    if (!position.emplace(order2[i], static_cast<double>(i)).second) {
      throw InvalidArgument("duplicate item '" + order2[i] + "' in ranking");
    }
  }
  if (order1.size() != order2.size()) throw InvalidArgument("rankings cover different item sets");
  std::vector<double> x;
  std::vector<double> y;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < order1.size(); ++i) {
    auto it = position.find(order1[i]);
    if (it == position.end()) throw InvalidArgument("item '" + order1[i] + "' missing from second ranking");
    if (!seen.insert(order1[i]).second) throw InvalidArgument("duplicate item '" + order1[i] + "' in ranking");
    x.push_back(static_cast<double>(i));
    y.push_back(it->second);
  }
  return kendall_tau_b(x, y, significance);
}

double f_score(double fitness, double precision) {
  if (fitness < 0.0 || fitness > 1.0 || precision < 0.0 || precision > 1.0) {
    throw InvalidArgument("fitness and precision must lie in [0, 1]");
  }
  if (fitness + precision == 0.0) return 0.0;
  return 2.0 * fitness * precision / (fitness + precision);
}

}  // namespace chaosmine
