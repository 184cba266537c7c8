#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedsleep::exp {

struct TtiRow {
  int tti = 0;  // index within the episode
  int episode = 0;
  std::uint64_t seed = 0;
  double throughput_mbps = 0.0;
  double energy_w = 0.0;
  double ee = 0.0;  // Mbps per W
  double mean_reward = 0.0;
  double drop_rate = 0.0;
};

struct RoundRow {
  std::uint64_t seed = 0;
  int round = 0;
  int episode = 0;
  int tti = 0;
  std::vector<int> accepted_ids;
  std::vector<int> rejected_ids;
  bool fallback = false;
  int malicious_rejected = 0;
  int benign_rejected = 0;
  std::vector<double> scores;  // defense scores by participant id
  double gan_disc_loss = 0.0;
  double gan_gen_loss = 0.0;
  double reg_td_loss = 0.0;
  std::size_t poisoned_records = 0;
  double kd_mean_kl = 0.0;
  int kd_local_distill = 0;
  double p_no = 0.0;
};

struct MetricsLog {
  std::vector<TtiRow> rows;
  std::vector<RoundRow> rounds;
  std::vector<std::uint64_t> failed_seeds;
  bool failed() const { return !failed_seeds.empty(); }
};

enum class Column { kThroughput, kEnergy, kEe, kReward, kDrop };

double column_value(const TtiRow& r, Column c);

/// Mean of `c` over every row of `seed`.
double seed_mean(const MetricsLog& log, std::uint64_t seed, Column c);

/// Mean of `c` over rows of `seed` whose episode lies in the first or last
/// third of `episodes` (floor(episodes / 3) episodes, at least one).
double first_third_mean(const MetricsLog& log, std::uint64_t seed, int episodes, Column c);
double final_third_mean(const MetricsLog& log, std::uint64_t seed, int episodes, Column c);

/// Per-episode means of `c` for one seed.
std::vector<double> episode_means(const MetricsLog& log, std::uint64_t seed, int episodes, Column c);

/// Seeds present in the log, ascending.
std::vector<std::uint64_t> seeds_of(const MetricsLog& log);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * stddev / sqrt(n) over per-seed means
};

MeanCi mean_ci(const std::vector<double>& per_seed);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace fedsleep::exp
