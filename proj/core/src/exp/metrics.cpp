#include "fedsleep/exp/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace fedsleep::exp {

double column_value(const TtiRow& r, Column c) {
  switch (c) {
    case Column::kThroughput: return r.throughput_mbps;
    case Column::kEnergy: return r.energy_w;
    case Column::kEe: return r.ee;
    case Column::kReward: return r.mean_reward;
    case Column::kDrop: return r.drop_rate;
  }
  return 0.0;
}

namespace {

double mean_where(const MetricsLog& log, std::uint64_t seed, Column c, int ep_lo, int ep_hi) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : log.rows) {
    if (r.seed == seed && r.episode >= ep_lo && r.episode < ep_hi) {
      s += column_value(r, c);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

}  // namespace

double seed_mean(const MetricsLog& log, std::uint64_t seed, Column c) {
  return mean_where(log, seed, c, 0, 1 << 30);
}

double first_third_mean(const MetricsLog& log, std::uint64_t seed, int episodes, Column c) {
  const int k = std::max(1, episodes / 3);
  return mean_where(log, seed, c, 0, k);
}

double final_third_mean(const MetricsLog& log, std::uint64_t seed, int episodes, Column c) {
  const int k = std::max(1, episodes / 3);
  return mean_where(log, seed, c, episodes - k, episodes);
}

std::vector<double> episode_means(const MetricsLog& log, std::uint64_t seed, int episodes, Column c) {
  std::vector<double> out;
  for (int e = 0; e < episodes; ++e) out.push_back(mean_where(log, seed, c, e, e + 1));
  return out;
}

std::vector<std::uint64_t> seeds_of(const MetricsLog& log) {
  std::set<std::uint64_t> s;
  for (const auto& r : log.rows) s.insert(r.seed);
  return {s.begin(), s.end()};
}

MeanCi mean_ci(const std::vector<double>& v) {
  MeanCi out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace fedsleep::exp
