#include "fedsleep/radio/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedsleep/common/error.hpp"
#include "fedsleep/radio/channel.hpp"
#include "fedsleep/radio/traffic.hpp"

namespace fedsleep::radio {

double ScenarioState::backlog_bits(int m) const {
  double s = 0.0;
  for (const auto& c : queues[m]) s += c.bits;
  return s;
}

double StepOutcome::total_throughput_bps() const {
  double s = mbs_throughput_bps;
  for (std::size_t n = 0; n < sbs_throughput_bps.size(); ++n) s += sleep_flag[n] * sbs_throughput_bps[n];
  return s;
}

double StepOutcome::total_power_w() const {
  return std::accumulate(sbs_power_w.begin(), sbs_power_w.end(), mbs_power_w);
}

double StepOutcome::energy_efficiency() const {
  const double p = total_power_w();
  return p > 0.0 ? total_throughput_bps() / p : 0.0;
}

double StepOutcome::mean_drop_rate() const {
  if (ue_drop_rate.empty()) return 0.0;
  return std::accumulate(ue_drop_rate.begin(), ue_drop_rate.end(), 0.0) / ue_drop_rate.size();
}

double sbs_power(const ScenarioConfig& config, int mode) {
  switch (mode) {
    case 0: return config.p_full_w;
    case 1: return config.sleep_ratio * config.p_full_w;
    case 2: return config.deep_sleep_ratio * config.p_full_w;
    default: throw DomainError("sleep mode must be 0, 1 or 2, got " + std::to_string(mode));
  }
}

double reward(int n, const StepOutcome& outcome, const RewardWeights& w) {
  return w.throughput * outcome.sbs_throughput_bps.at(n) * 1e-6 - w.drop * outcome.sbs_drop_rate.at(n) -
         w.energy * outcome.sbs_power_w.at(n);
}

double compute_sinr(const ScenarioConfig& config, const Layout& layout, const ScenarioState& state,
                    int n, int m, int r) {
  if (state.prb_owner.at(n).at(r) != m) {
    throw DomainError("compute_sinr: PRB " + std::to_string(r) + " of SBS " +
                                std::to_string(n) + " is not allocated to UE " + std::to_string(m));
  }
  const double p = config.p_tx_sbs_w / config.n_prb;
  const double signal = layout.sbs_gain[n][m] * p;
  double interference = 0.0;
  for (int k = 0; k < layout.n_sbs(); ++k) {
    if (k == n || state.prb_owner[k][r] < 0) continue;
    interference += layout.sbs_gain[k][m] * p;
  }
  const double noise = noise_watts(config.noise_density_dbm_hz, config.noise_figure_db,
                                   config.prb_bandwidth_hz());
  return signal / (interference + noise);
}

double link_capacity(const ScenarioConfig& config, const Layout& layout, const ScenarioState& state,
                     int n, int m) {
  if (!state.serving(n)) return 0.0;
  double c = 0.0;
  for (int r = 0; r < config.n_prb; ++r) {
    if (state.prb_owner[n][r] == m) {
      c += prb_rate(config.prb_bandwidth_hz(), compute_sinr(config, layout, state, n, m, r));
    }
  }
  return c;
}

Network::Network(ScenarioConfig config) : config_(std::move(config)), layout_(build_layout(config_)) {
  const double max_peak =
      *std::max_element(layout_.peak_load_mbps.begin(), layout_.peak_load_mbps.end());
  load_norm_bps_ = 1.5 * max_peak * 1e6;
  const double sum_peak =
      std::accumulate(layout_.peak_load_mbps.begin(), layout_.peak_load_mbps.end(), 0.0);
  mbs_load_norm_bps_ = 1.2 * (sum_peak + config_.mbs_peak_load_mbps) * 1e6;
  reset_episode(0);
}

void Network::reset_episode(std::int64_t clock) {
  const int n_sbs = layout_.n_sbs();
  state_.prb_owner.assign(n_sbs, std::vector<int>(config_.n_prb, -1));
  state_.mbs_prb_owner.assign(config_.mbs_prbs(), -1);
  state_.sleep_mode.assign(n_sbs, 0);
  state_.sleep_flag.assign(n_sbs, 1);
  state_.wake_countdown.assign(n_sbs, 0);
  state_.queues.assign(layout_.ues.size(), {});
  state_.clock = clock;
  state_.sbs_load_history.assign(n_sbs, std::deque<double>(kHistoryLength, 0.0));
  state_.mbs_load_history.assign(kHistoryLength, 0.0);
  state_.last_throughput_bps.assign(n_sbs, 0.0);
}

double Network::mbs_sinr(int m) const {
  const double p = config_.p_tx_mbs_w / config_.n_prb;
  const double noise = noise_watts(config_.noise_density_dbm_hz, config_.noise_figure_db,
                                   config_.prb_bandwidth_hz());
  const double interference = config_.neighbour_macro_activity * p * layout_.neighbour_mbs_gain[m];
  return layout_.mbs_gain[m] * p / (interference + noise);
}

void Network::allocate(int n, const std::vector<int>& ues, double per_prb_power_w, bool is_mbs) {
  auto& owner = is_mbs ? state_.mbs_prb_owner : state_.prb_owner[n];
  std::fill(owner.begin(), owner.end(), -1);
  if (ues.empty()) return;

  const double noise = noise_watts(config_.noise_density_dbm_hz, config_.noise_figure_db,
                                   config_.prb_bandwidth_hz());
  const double tti_s = config_.tti_s();
  // Demand in PRBs under worst-case interference (every serving SBS on every PRB).
  std::vector<int> demand(ues.size());
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const int m = ues[i];
    double sinr;
    if (is_mbs) {
      sinr = mbs_sinr(m);
    } else {
      double interference = 0.0;
      for (int k = 0; k < layout_.n_sbs(); ++k) {
        if (k != n && state_.serving(k)) interference += layout_.sbs_gain[k][m] * per_prb_power_w;
      }
      sinr = layout_.sbs_gain[n][m] * per_prb_power_w / (interference + noise);
    }
    const double bits_per_prb = prb_rate(config_.prb_bandwidth_hz(), sinr) * tti_s;
    demand[i] = static_cast<int>(std::ceil(state_.backlog_bits(m) / bits_per_prb - 1e-12));
  }

  // Round robin, one PRB per backlogged UE per pass, starting at a rotating offset.
  const std::size_t k = ues.size();
  const std::size_t cursor = static_cast<std::size_t>(state_.clock % static_cast<std::int64_t>(k));
  int r = 0;
  bool progress = true;
  const int prbs = static_cast<int>(owner.size());
  while (r < prbs && progress) {
    progress = false;
    for (std::size_t step = 0; step < k && r < prbs; ++step) {
      const std::size_t i = (cursor + step) % k;
      if (demand[i] <= 0) continue;
      owner[r++] = ues[i];
      --demand[i];
      progress = true;
    }
  }
}

StepOutcome Network::step(std::span<const int> actions) {
  const int n_sbs = layout_.n_sbs();
  if (static_cast<int>(actions.size()) != n_sbs) {
    throw DomainError("step: expected " + std::to_string(n_sbs) + " actions, got " +
                      std::to_string(actions.size()));
  }
  for (int a : actions) {
    if (a < 0 || a > 2) throw DomainError("step: action must be 0, 1 or 2, got " + std::to_string(a));
  }

  // Sleep transitions. Leaving deep sleep costs deep_sleep_wake_ttis of
  // full-power, non-serving time.
  for (int n = 0; n < n_sbs; ++n) {
    const int prev = state_.sleep_mode[n];
    const int next = actions[n];
    if (next == 0) {
      if (prev == 2) state_.wake_countdown[n] = config_.deep_sleep_wake_ttis;
      else if (prev == 1) state_.wake_countdown[n] = 0;
    } else {
      state_.wake_countdown[n] = 0;
    }
    state_.sleep_mode[n] = next;
    state_.sleep_flag[n] = next == 0 ? 1 : 0;
  }

  // Arrivals.
  const std::int64_t clock = state_.clock;
  const auto arrivals = generate_traffic(config_, layout_, clock);
  for (std::size_t m = 0; m < arrivals.size(); ++m) {
    if (arrivals[m] > 0.0) state_.queues[m].push_back({clock, arrivals[m]});
  }

  // Who serves whom.
  std::vector<int> mbs_served;
  std::vector<std::vector<int>> sbs_served(n_sbs);
  for (std::size_t m = 0; m < layout_.ues.size(); ++m) {
    const int home = layout_.ue_home[m];
    const bool backlogged = !state_.queues[m].empty();
    if (home >= 0 && state_.serving(home)) {
      if (backlogged) sbs_served[home].push_back(static_cast<int>(m));
    } else if (backlogged) {
      mbs_served.push_back(static_cast<int>(m));
    }
  }

  const double sbs_prb_power = config_.p_tx_sbs_w / config_.n_prb;
  const double mbs_prb_power = config_.p_tx_mbs_w / config_.n_prb;
  for (int n = 0; n < n_sbs; ++n) allocate(n, sbs_served[n], sbs_prb_power, false);
  allocate(-1, mbs_served, mbs_prb_power, true);

  // Capacities under the actual allocation.
  std::vector<double> capacity_bps(layout_.ues.size(), 0.0);
  for (int n = 0; n < n_sbs; ++n) {
    for (int r = 0; r < config_.n_prb; ++r) {
      const int m = state_.prb_owner[n][r];
      if (m >= 0) {
        capacity_bps[m] += prb_rate(config_.prb_bandwidth_hz(),
                                    compute_sinr(config_, layout_, state_, n, m, r));
      }
    }
  }
  int mbs_used_prbs = 0;
  for (int m : state_.mbs_prb_owner) {
    if (m < 0) continue;
    ++mbs_used_prbs;
    capacity_bps[m] += prb_rate(config_.prb_bandwidth_hz(), mbs_sinr(m));
  }

  // Serve FIFO, then drop anything that has waited out the latency budget.
  StepOutcome out;
  out.sbs_throughput_bps.assign(n_sbs, 0.0);
  out.sbs_power_w.resize(n_sbs);
  out.ue_drop_rate.assign(layout_.ues.size(), 0.0);
  out.sbs_drop_rate.assign(n_sbs, 0.0);
  out.sleep_flag = state_.sleep_flag;
  out.sbs_offered_bps.assign(n_sbs, 0.0);

  const double tti_s = config_.tti_s();
  const int budget = config_.latency_budget_ttis();
  double mbs_served_bits = 0.0;
  for (std::size_t m = 0; m < layout_.ues.size(); ++m) {
    auto& q = state_.queues[m];
    double allowance = capacity_bps[m] * tti_s;
    double served = 0.0;
    while (!q.empty() && allowance > 0.0) {
      const double take = std::min(allowance, q.front().bits);
      served += take;
      allowance -= take;
      q.front().bits -= take;
      if (q.front().bits <= 1e-9) q.pop_front();
    }
    double dropped = 0.0;
    while (!q.empty() && clock - q.front().arrival_tti + 1 >= budget) {
      dropped += q.front().bits;
      q.pop_front();
    }
    out.served_bits += served;
    out.dropped_bits += dropped;
    out.arrived_bits += arrivals[m];
    out.ue_drop_rate[m] = (served + dropped) > 0.0 ? dropped / (served + dropped) : 0.0;

    const int home = layout_.ue_home[m];
    if (home >= 0 && state_.serving(home)) {
      out.sbs_throughput_bps[home] += served / tti_s;
    } else {
      mbs_served_bits += served;
    }
  }
  out.mbs_throughput_bps = mbs_served_bits / tti_s;

  double mbs_offered_bits = 0.0;
  for (int n = 0; n < n_sbs; ++n) {
    double offered = 0.0;
    double eps = 0.0;
    for (int m : layout_.sbs_ues[n]) {
      offered += arrivals[m];
      eps += out.ue_drop_rate[m];
    }
    if (!layout_.sbs_ues[n].empty()) eps /= layout_.sbs_ues[n].size();
    out.sbs_drop_rate[n] = eps;
    out.sbs_offered_bps[n] = offered / tti_s;
    if (!state_.serving(n)) mbs_offered_bits += offered;
    out.sbs_power_w[n] = sbs_power(config_, state_.sleep_mode[n]);
  }
  for (int m : layout_.macro_ues) mbs_offered_bits += arrivals[m];
  out.mbs_offered_bps = mbs_offered_bits / tti_s;
  out.mbs_power_w = config_.p_mbs_static_w +
                    config_.p_tx_mbs_w * static_cast<double>(mbs_used_prbs) / config_.n_prb;
  out.ee_bits_per_joule = out.energy_efficiency();

  // Histories for the next observation.
  for (int n = 0; n < n_sbs; ++n) {
    auto& h = state_.sbs_load_history[n];
    h.push_front(out.sbs_offered_bps[n]);
    h.pop_back();
    state_.last_throughput_bps[n] = out.sbs_throughput_bps[n];
  }
  state_.mbs_load_history.push_front(out.mbs_offered_bps);
  state_.mbs_load_history.pop_back();

  for (int n = 0; n < n_sbs; ++n) {
    if (state_.sleep_mode[n] == 0 && state_.wake_countdown[n] > 0) --state_.wake_countdown[n];
  }
  ++state_.clock;
  return out;
}

std::vector<double> Network::observe(int n) const {
  std::vector<double> s(static_cast<std::size_t>(config_.state_width), 0.0);
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  s[0] = state_.sleep_flag.at(n);
  for (int i = 0; i < kHistoryLength; ++i) {
    s[1 + i] = clamp01(state_.sbs_load_history[n][i] / load_norm_bps_);
    s[1 + kHistoryLength + i] = clamp01(state_.mbs_load_history[i] / mbs_load_norm_bps_);
  }
  s[1 + 2 * kHistoryLength] = clamp01(state_.last_throughput_bps[n] / load_norm_bps_);
  return s;
}

}  // namespace fedsleep::radio
