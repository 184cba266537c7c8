#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fedsleep/common/error.hpp"
#include "fedsleep/common/rng.hpp"
#include "fedsleep/radio/channel.hpp"
#include "fedsleep/radio/network.hpp"
#include "fedsleep/radio/traffic.hpp"

using namespace fedsleep;
using namespace fedsleep::radio;

namespace {

// One SBS, one UE, one 180 kHz PRB, no noise figure.
struct SingleLink {
  ScenarioConfig config;
  Layout layout;
  ScenarioState state;

  explicit SingleLink(int n_sbs = 1) {
    config.n_sbs = n_sbs;
    config.n_prb = 1;
    config.p_tx_sbs_w = 4.0;
    config.noise_figure_db = 0.0;
    layout.sbs.assign(n_sbs, Point{});
    layout.ues.assign(1, Point{});
    layout.sbs_gain.assign(n_sbs, std::vector<double>(1, 1e-10));
    state.prb_owner.assign(n_sbs, std::vector<int>(1, 0));
    state.sleep_mode.assign(n_sbs, 0);
    state.sleep_flag.assign(n_sbs, 1);
    state.wake_countdown.assign(n_sbs, 0);
  }
};

double thermal_noise_180khz() { return std::pow(10.0, (-174.0 - 30.0) / 10.0) * 180e3; }

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.n_sbs = 4;
  c.ues_per_sbs_min = 2;
  c.ues_per_sbs_max = 3;
  c.mbs_ues = 3;
  c.day_length_ttis = 240;
  c.seed = 11;
  return c;
}

}  // namespace

TEST(PathLoss, OneKilometre) { EXPECT_NEAR(path_loss_db(1000.0), 128.1, 1e-12); }

TEST(PathLoss, OneDecadeAdds376) { EXPECT_NEAR(path_loss_db(10000.0), 165.7, 1e-9); }

TEST(PathLoss, HalfKilometre) { EXPECT_NEAR(path_loss_db(500.0), 116.781273, 1e-6); }

TEST(PathLoss, RejectsNonPositiveDistance) {
  EXPECT_THROW(path_loss_db(0.0), DomainError);
  EXPECT_THROW(path_loss_db(-5.0), DomainError);
}

TEST(Sinr, SingleAwakeSbs) {
  SingleLink s;
  const double expected = 4e-10 / thermal_noise_180khz();
  EXPECT_NEAR(thermal_noise_180khz(), 7.1667e-16, 1e-19);
  EXPECT_NEAR(compute_sinr(s.config, s.layout, s.state, 0, 0, 0) / expected, 1.0, 1e-12);
}

TEST(Sinr, CoChannelInterfererWithEqualGain) {
  SingleLink s(2);
  const double expected = 4e-10 / (4e-10 + thermal_noise_180khz());
  EXPECT_NEAR(compute_sinr(s.config, s.layout, s.state, 0, 0, 0), expected, 1e-12);
}

TEST(Sinr, IdleInterfererContributesNothing) {
  SingleLink alone;
  SingleLink pair(2);
  pair.state.prb_owner[1][0] = -1;
  EXPECT_DOUBLE_EQ(compute_sinr(pair.config, pair.layout, pair.state, 0, 0, 0),
                   compute_sinr(alone.config, alone.layout, alone.state, 0, 0, 0));
}

TEST(Sinr, UnallocatedPrbThrows) {
  SingleLink s;
  s.state.prb_owner[0][0] = -1;
  EXPECT_THROW(compute_sinr(s.config, s.layout, s.state, 0, 0, 0), DomainError);
}

TEST(Capacity, OnePrbShannonRate) {
  EXPECT_NEAR(prb_rate(180e3, 558.0), 180e3 * std::log2(559.0), 1e-6);
  EXPECT_NEAR(prb_rate(180e3, 558.0), 1.643e6, 1e3);
}

TEST(Capacity, EmptyAllocationIsZero) {
  SingleLink s;
  s.state.prb_owner[0][0] = -1;
  EXPECT_EQ(link_capacity(s.config, s.layout, s.state, 0, 0), 0.0);
}

TEST(Capacity, TwoIdenticalPrbsDouble) {
  SingleLink one;
  SingleLink two;
  two.config.n_prb = 2;
  two.config.p_tx_sbs_w = 8.0;  // same per-PRB power
  two.state.prb_owner[0] = {0, 0};
  EXPECT_NEAR(link_capacity(two.config, two.layout, two.state, 0, 0),
              2.0 * link_capacity(one.config, one.layout, one.state, 0, 0), 1e-6);
}

TEST(Capacity, SleepingSbsServesNothing) {
  SingleLink s;
  s.state.sleep_mode[0] = 1;
  s.state.sleep_flag[0] = 0;
  EXPECT_EQ(link_capacity(s.config, s.layout, s.state, 0, 0), 0.0);
}

TEST(Traffic, PeakAndTroughOfProfile) {
  ScenarioConfig c;
  EXPECT_NEAR(diurnal_fraction(c, c.peak_hour), 1.0, 1e-12);
  EXPECT_NEAR(diurnal_fraction(c, c.trough_hour), 0.2, 1e-12);
  for (double h = 0.0; h < 24.0; h += 0.25) {
    EXPECT_GE(diurnal_fraction(c, h), 0.2 - 1e-12);
    EXPECT_LE(diurnal_fraction(c, h), 1.0 + 1e-12);
  }
}

TEST(Traffic, OfferedLoadScalesWithPeak) {
  const auto c = small_scenario();
  const auto layout = build_layout(c);
  const std::int64_t peak_clock = static_cast<std::int64_t>(c.peak_hour / 24.0 * c.day_length_ttis);
  for (int n = 0; n < c.n_sbs; ++n) {
    EXPECT_NEAR(sbs_offered_bps(c, layout, n, peak_clock), layout.peak_load_mbps[n] * 1e6, 1e-3);
  }
}

TEST(Traffic, SameSeedSameClockSameArrivals) {
  const auto c = small_scenario();
  const auto layout = build_layout(c);
  EXPECT_EQ(generate_traffic(c, layout, 17), generate_traffic(c, layout, 17));
}

TEST(Traffic, PoissonMeanMatchesOfferedLoad) {
  auto c = small_scenario();
  c.day_length_ttis = 0;
  const auto layout = build_layout(c);
  const auto& ues = layout.sbs_ues[0];
  double total = 0.0;
  const int draws = 4000;
  const std::int64_t clock = 0;
  for (int k = 0; k < draws; ++k) {
    c.seed = 1000 + k;
    const auto a = generate_traffic(c, layout, clock);
    for (int m : ues) total += a[m];
  }
  const double expected = sbs_offered_bps(c, layout, 0, clock) * c.tti_s();
  EXPECT_NEAR(total / draws / expected, 1.0, 0.05);
}

TEST(Power, SleepModes) {
  ScenarioConfig c;
  EXPECT_DOUBLE_EQ(sbs_power(c, 0), c.p_full_w);
  EXPECT_DOUBLE_EQ(sbs_power(c, 1), 0.5 * c.p_full_w);
  EXPECT_DOUBLE_EQ(sbs_power(c, 2), 0.15 * c.p_full_w);
  EXPECT_THROW(sbs_power(c, 3), DomainError);
}

TEST(Reward, ScalarEvaluation) {
  StepOutcome o;
  o.sbs_throughput_bps = {4e6};
  o.sbs_drop_rate = {0.0};
  o.sbs_power_w = {10.0};
  RewardWeights w;
  EXPECT_DOUBLE_EQ(w.throughput, 0.25);
  EXPECT_DOUBLE_EQ(w.drop, 1.0);
  EXPECT_DOUBLE_EQ(w.energy, 0.05);
  EXPECT_NEAR(reward(0, o, w), 0.5, 1e-12);
}

TEST(Reward, DeepSleepIdle) {
  ScenarioConfig c;
  StepOutcome o;
  o.sbs_throughput_bps = {0.0};
  o.sbs_drop_rate = {0.0};
  o.sbs_power_w = {sbs_power(c, 2)};
  EXPECT_NEAR(reward(0, o), -0.05 * 0.15 * c.p_full_w, 1e-12);
}

TEST(Network, StateVectorShape) {
  Network net(small_scenario());
  net.reset_episode(0);
  const auto s = net.observe(0);
  ASSERT_EQ(s.size(), 12u);
  for (int i = 1; i < 11; ++i) EXPECT_EQ(s[i], 0.0);
}

TEST(Network, InvalidActionThrows) {
  Network net(small_scenario());
  net.reset_episode(0);
  std::vector<int> a(4, 0);
  a[2] = 3;
  EXPECT_THROW(net.step(a), DomainError);
}

TEST(Network, StepInvariants) {
  const auto c = small_scenario();
  Network net(c);
  net.reset_episode(0);
  Rng rng = make_rng(5, Stream::kOracle);
  std::uniform_int_distribution<int> act(0, 2);
  double backlog_before = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<int> a(c.n_sbs);
    for (auto& x : a) x = act(rng);
    const auto o = net.step(a);
    for (int n = 0; n < c.n_sbs; ++n) {
      EXPECT_GE(o.sbs_power_w[n], c.deep_sleep_ratio * c.p_full_w - 1e-12);
      EXPECT_LE(o.sbs_power_w[n], c.p_full_w + 1e-12);
      EXPECT_EQ(o.sleep_flag[n], a[n] == 0 ? 1 : 0);
      EXPECT_EQ(net.state().sleep_flag[n], net.state().sleep_mode[n] == 0 ? 1 : 0);
    }
    for (double e : o.ue_drop_rate) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 1.0);
    }
    EXPECT_GE(o.ee_bits_per_joule, 0.0);
    EXPECT_NEAR(o.ee_bits_per_joule, o.energy_efficiency(), 1e-12 * std::max(1.0, o.ee_bits_per_joule));
    EXPECT_LE(o.served_bits, o.arrived_bits + backlog_before + 1e-6);
    double backlog = 0.0;
    for (int m = 0; m < static_cast<int>(net.layout().ues.size()); ++m) {
      EXPECT_GE(net.state().backlog_bits(m), 0.0);
      backlog += net.state().backlog_bits(m);
    }
    backlog_before = backlog;
  }
}

TEST(Network, DeepSleepDrawsFifteenPercent) {
  const auto c = small_scenario();
  Network net(c);
  net.reset_episode(0);
  const std::vector<int> a(c.n_sbs, 2);
  const auto o = net.step(a);
  for (double p : o.sbs_power_w) EXPECT_NEAR(p, 0.15 * c.p_full_w, 1e-12);
}

TEST(Network, AllActiveWithoutTrafficUsesFullPower) {
  auto c = small_scenario();
  c.packet_bits = 1e30;  // no packet ever arrives
  c.mbs_peak_load_mbps = 0.0;
  Network net(c);
  net.reset_episode(0);
  const auto o = net.step(std::vector<int>(c.n_sbs, 0));
  for (int n = 0; n < c.n_sbs; ++n) {
    EXPECT_EQ(o.sbs_throughput_bps[n], 0.0);
    EXPECT_DOUBLE_EQ(o.sbs_power_w[n], c.p_full_w);
  }
  EXPECT_NEAR(o.ee_bits_per_joule, o.mbs_throughput_bps / o.total_power_w(), 1e-12);
}

TEST(Network, AllAsleepWithoutMacroTrafficHasZeroEe) {
  auto c = small_scenario();
  c.packet_bits = 1e30;  // no packet ever arrives
  c.mbs_peak_load_mbps = 0.0;
  Network net(c);
  net.reset_episode(0);
  const auto o = net.step(std::vector<int>(c.n_sbs, 1));
  EXPECT_EQ(o.ee_bits_per_joule, 0.0);
}

TEST(Network, DeterministicTrace) {
  const auto c = small_scenario();
  Network a(c), b(c);
  a.reset_episode(0);
  b.reset_episode(0);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> act(c.n_sbs, t % 3);
    const auto oa = a.step(act);
    const auto ob = b.step(act);
    EXPECT_EQ(oa.sbs_throughput_bps, ob.sbs_throughput_bps);
    EXPECT_EQ(oa.ee_bits_per_joule, ob.ee_bits_per_joule);
    EXPECT_EQ(oa.ue_drop_rate, ob.ue_drop_rate);
  }
}

TEST(Network, ConstantLoadFillsHistoryEqually) {
  Network net(small_scenario());
  net.reset_episode(0);
  const double load = 0.4 * net.load_norm_bps();
  for (auto& h : net.mutable_state().sbs_load_history[0]) h = load;
  const auto s = net.observe(0);
  for (int i = 1; i <= 5; ++i) EXPECT_NEAR(s[i], 0.4, 1e-12);
}

TEST(Scenario, ValidateRejectsBadValues) {
  ScenarioConfig c;
  c.n_sbs = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.mbs_prb_count = c.n_prb + 1;
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.neighbour_macro_activity = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Scenario, LayoutDeterministicInSeed) {
  const auto c = small_scenario();
  const auto a = build_layout(c), b = build_layout(c);
  EXPECT_EQ(a.mbs_gain, b.mbs_gain);
  EXPECT_EQ(a.peak_load_mbps, b.peak_load_mbps);
  EXPECT_EQ(a.neighbour_mbs.size(), 6u);
}

TEST(Scenario, IidLayoutIsIdenticalPerSbs) {
  auto c = small_scenario();
  c.iid = true;
  const auto l = build_layout(c);
  for (int n = 1; n < c.n_sbs; ++n) {
    EXPECT_EQ(l.sbs_ues[n].size(), l.sbs_ues[0].size());
    EXPECT_EQ(l.peak_load_mbps[n], l.peak_load_mbps[0]);
  }
}
