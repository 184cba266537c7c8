#pragma once

#include <cstdint>
#include <vector>

#include "fedsleep/common/rng.hpp"

namespace fedsleep::radio {

/// Network scenario. Defaults reproduce the 20-SBS reference deployment;
/// P_w, the MBS static draw, geometry and the noise figure are engineering
/// choices rather than published values.
struct ScenarioConfig {
  int n_sbs = 20;
  int ues_per_sbs_min = 3;
  int ues_per_sbs_max = 11;
  std::vector<double> peak_load_choices_mbps{12.0, 14.0, 16.0, 18.0};

  double bandwidth_hz = 20e6;
  int n_prb = 100;
  int subcarriers_per_prb = 12;
  double subcarrier_hz = 15e3;

  /// PRBs the MBS can schedule; 0 means n_prb. Per-PRB power stays p_tx_mbs_w / n_prb.
  int mbs_prb_count = 0;
  double p_tx_mbs_w = 40.0;
  double p_tx_sbs_w = 4.0;
  double carrier_sbs_ghz = 3.5;
  double carrier_mbs_ghz = 2.0;

  double sleep_ratio = 0.5;         // gamma_1
  double deep_sleep_ratio = 0.15;   // gamma_2
  double p_full_w = 20.0;           // P_w: 4 W transmit + 16 W amplifier/processor/FPGA
  double p_mbs_static_w = 100.0;    // constant part of P_0; transmit part scales with PRB use

  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;

  double tti_ms = 10.0;
  int deep_sleep_wake_ttis = 3;
  double latency_budget_ms = 100.0;
  double packet_bits = 12000.0;

  // Diurnal profile: piecewise half-cosines between the trough and the peak.
  double trough_fraction = 0.2;
  double trough_hour = 4.0;
  double peak_hour = 20.0;
  /// TTIs per simulated day; 0 means real time (86400 s / tti).
  std::int64_t day_length_ttis = 0;

  // Macro-cell users sharing the MBS with offloaded traffic.
  int mbs_ues = 10;
  double mbs_peak_load_mbps = 30.0;

  // Geometry (metres).
  double sbs_ring_min_m = 400.0;
  double sbs_ring_max_m = 900.0;
  double min_sbs_spacing_m = 150.0;
  double ue_radius_min_m = 10.0;
  double ue_radius_max_m = 80.0;
  double mbs_ue_radius_min_m = 50.0;
  double mbs_ue_radius_max_m = 400.0;

  // Co-channel macro sites on a hexagonal ring around the serving MBS. They
  // interfere on the macro carrier only, with `activity` the busy PRB share.
  int neighbour_macro_sites = 6;
  double macro_isd_m = 1600.0;
  double neighbour_macro_activity = 1.0;

  /// Identical load, UE count and UE placement at every SBS.
  bool iid = false;
  double iid_peak_load_mbps = 15.0;

  int state_width = 12;
  std::uint64_t seed = 1;

  double prb_bandwidth_hz() const { return subcarriers_per_prb * subcarrier_hz; }
  double tti_s() const { return tti_ms * 1e-3; }
  int mbs_prbs() const { return mbs_prb_count > 0 ? mbs_prb_count : n_prb; }
  std::int64_t day_ttis() const;
  int latency_budget_ttis() const;

  /// Throws DomainError on the first violated invariant.
  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Static placement and link gains. UEs are indexed globally; SBS-attached
/// UEs come first, then macro UEs.
struct Layout {
  Point mbs;
  std::vector<Point> sbs;
  std::vector<Point> ues;
  std::vector<int> ue_home;                  // SBS index, or -1 for a macro UE
  std::vector<std::vector<int>> sbs_ues;     // UE ids per SBS
  std::vector<int> macro_ues;
  std::vector<double> peak_load_mbps;        // per SBS
  std::vector<std::vector<double>> sbs_gain; // [sbs][ue], linear
  std::vector<double> mbs_gain;              // [ue], linear
  std::vector<Point> neighbour_mbs;
  std::vector<double> neighbour_mbs_gain;    // [ue], summed over neighbour sites

  int n_sbs() const { return static_cast<int>(sbs.size()); }
  int n_ues() const { return static_cast<int>(ues.size()); }
};

/// Deterministic in `config.seed`.
Layout build_layout(const ScenarioConfig& config);

}  // namespace fedsleep::radio
