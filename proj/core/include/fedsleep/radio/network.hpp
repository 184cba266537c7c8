#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "fedsleep/radio/scenario.hpp"

namespace fedsleep::radio {

enum class SleepMode : int { kActive = 0, kSleep = 1, kDeepSleep = 2 };
constexpr int kActionCount = 3;
constexpr int kHistoryLength = 5;

struct QueueChunk {
  std::int64_t arrival_tti = 0;
  double bits = 0.0;
};

/// Full network snapshot. `prb_owner[n][r]` is the UE holding PRB r at SBS n
/// (-1 when unused), which encodes the binary allocation beta with at most one
/// UE per (n, r).
struct ScenarioState {
  std::vector<std::vector<int>> prb_owner;
  std::vector<int> mbs_prb_owner;
  std::vector<int> sleep_mode;      // a_n in {0, 1, 2}
  std::vector<int> sleep_flag;      // delta_n = 1 iff a_n == 0
  std::vector<int> wake_countdown;  // TTIs before a waking SBS serves
  std::vector<std::deque<QueueChunk>> queues;
  std::int64_t clock = 0;

  std::vector<std::deque<double>> sbs_load_history;  // bits/s, newest first
  std::deque<double> mbs_load_history;
  std::vector<double> last_throughput_bps;

  bool serving(int n) const { return sleep_mode[n] == 0 && wake_countdown[n] == 0; }
  double backlog_bits(int m) const;
};

struct StepOutcome {
  std::vector<double> sbs_throughput_bps;  // b_n
  double mbs_throughput_bps = 0.0;         // b_0
  std::vector<double> sbs_power_w;         // P_n
  double mbs_power_w = 0.0;                // P_0
  std::vector<double> ue_drop_rate;        // eps_m, every UE
  std::vector<double> sbs_drop_rate;       // mean eps_m over each SBS's UEs
  std::vector<int> sleep_flag;             // delta_n
  std::vector<double> sbs_offered_bps;
  double mbs_offered_bps = 0.0;
  double served_bits = 0.0;
  double dropped_bits = 0.0;
  double arrived_bits = 0.0;
  double ee_bits_per_joule = 0.0;

  /// Recomputes (sum delta_n b_n + b_0) / (sum P_n + P_0) from the fields.
  double energy_efficiency() const;
  double total_throughput_bps() const;
  double total_power_w() const;
  double mean_drop_rate() const;
};

/// Reward weights (omega_1, omega_2, omega_3).
struct RewardWeights {
  double throughput = 0.25;
  double drop = 1.0;
  double energy = 0.05;
};

/// SINR of UE `m` on PRB `r` of SBS `n`. Requires beta[n][m][r] = 1.
double compute_sinr(const ScenarioConfig& config, const Layout& layout, const ScenarioState& state,
                    int n, int m, int r);

/// Sum over PRBs allocated to (n, m) of B_r log2(1 + SINR); zero when SBS n
/// is not serving.
double link_capacity(const ScenarioConfig& config, const Layout& layout, const ScenarioState& state,
                     int n, int m);

/// Energy draw of an SBS in `mode`: P_w, gamma_1 P_w or gamma_2 P_w.
double sbs_power(const ScenarioConfig& config, int mode);

/// omega_1 b_n[Mbps] - omega_2 eps_n - omega_3 P_n[W].
double reward(int n, const StepOutcome& outcome, const RewardWeights& weights = {});

/// Discrete-time simulator over one scenario.
class Network {
 public:
  explicit Network(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const Layout& layout() const { return layout_; }
  const ScenarioState& state() const { return state_; }
  ScenarioState& mutable_state() { return state_; }

  /// Clears queues, histories and sleep states; the clock keeps running so
  /// every episode sees fresh arrivals.
  void reset_episode(std::int64_t clock);

  /// Applies one TTI with per-SBS actions. Throws DomainError for actions
  /// outside {0, 1, 2}.
  StepOutcome step(std::span<const int> actions);

  /// Normalised state of SBS n: {delta_n, L_n[5], L_0[5], b_n}, zero padded to
  /// config.state_width.
  std::vector<double> observe(int n) const;

  double load_norm_bps() const { return load_norm_bps_; }
  double mbs_load_norm_bps() const { return mbs_load_norm_bps_; }

  /// SINR of UE m on any macro PRB, with neighbour macro sites as interferers.
  double mbs_sinr(int m) const;

 private:
  void allocate(int n, const std::vector<int>& ues, double per_prb_power_w, bool is_mbs);

  ScenarioConfig config_;
  Layout layout_;
  ScenarioState state_;
  double load_norm_bps_ = 1.0;
  double mbs_load_norm_bps_ = 1.0;
};

}  // namespace fedsleep::radio
