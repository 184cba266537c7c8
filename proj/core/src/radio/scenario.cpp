#include "fedsleep/radio/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fedsleep/common/error.hpp"
#include "fedsleep/radio/channel.hpp"

namespace fedsleep::radio {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("ScenarioConfig: " + what);
}

Point polar(Point centre, double r, double theta) {
  return {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)};
}

/// Uniform over an annulus (area-uniform radius).
Point sample_annulus(Point centre, double r_min, double r_max, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(r_min * r_min + u(rng) * (r_max * r_max - r_min * r_min));
  const double theta = 2.0 * std::numbers::pi * u(rng);
  return polar(centre, r, theta);
}

}  // namespace

std::int64_t ScenarioConfig::day_ttis() const {
  if (day_length_ttis > 0) return day_length_ttis;
  return static_cast<std::int64_t>(std::llround(86400.0 * 1000.0 / tti_ms));
}

int ScenarioConfig::latency_budget_ttis() const {
  return std::max(1, static_cast<int>(std::ceil(latency_budget_ms / tti_ms - 1e-9)));
}

void ScenarioConfig::validate() const {
  require(n_sbs >= 1, "n_sbs must be >= 1");
  require(ues_per_sbs_min >= 1 && ues_per_sbs_max >= ues_per_sbs_min, "ues_per_sbs range invalid");
  require(!peak_load_choices_mbps.empty(), "peak_load_choices_mbps empty");
  for (double p : peak_load_choices_mbps) require(p > 0.0, "peak loads must be positive");
  require(n_prb >= 1 && subcarriers_per_prb >= 1 && subcarrier_hz > 0.0, "PRB layout invalid");
  require(n_prb * subcarriers_per_prb * subcarrier_hz <= bandwidth_hz * (1.0 + 1e-12),
          "n_prb * subcarriers_per_prb * subcarrier_hz exceeds bandwidth_hz");
  require(mbs_prb_count >= 0 && mbs_prb_count <= n_prb, "mbs_prb_count must be in [0, n_prb]");
  require(0.0 < deep_sleep_ratio && deep_sleep_ratio < sleep_ratio && sleep_ratio < 1.0,
          "need 0 < deep_sleep_ratio < sleep_ratio < 1");
  require(p_tx_mbs_w > 0.0 && p_tx_sbs_w > 0.0 && p_full_w > 0.0 && p_mbs_static_w > 0.0,
          "all powers must be positive");
  require(tti_ms > 0.0, "tti_ms must be positive");
  require(deep_sleep_wake_ttis >= 0, "deep_sleep_wake_ttis must be >= 0");
  require(latency_budget_ms > 0.0, "latency_budget_ms must be positive");
  require(packet_bits > 0.0, "packet_bits must be positive");
  require(trough_fraction > 0.0 && trough_fraction <= 1.0, "trough_fraction must be in (0, 1]");
  require(trough_hour >= 0.0 && trough_hour < peak_hour && peak_hour < 24.0,
          "need 0 <= trough_hour < peak_hour < 24");
  require(day_length_ttis >= 0, "day_length_ttis must be >= 0");
  require(mbs_ues >= 0 && mbs_peak_load_mbps >= 0.0, "macro users invalid");
  require(sbs_ring_min_m > 0.0 && sbs_ring_max_m >= sbs_ring_min_m, "SBS ring invalid");
  require(ue_radius_min_m > 0.0 && ue_radius_max_m >= ue_radius_min_m, "UE radius invalid");
  require(mbs_ue_radius_min_m > 0.0 && mbs_ue_radius_max_m >= mbs_ue_radius_min_m,
          "macro UE radius invalid");
  require(neighbour_macro_sites >= 0 && macro_isd_m > 0.0, "neighbour macro ring invalid");
  require(neighbour_macro_activity >= 0.0 && neighbour_macro_activity <= 1.0,
          "neighbour_macro_activity must be in [0, 1]");
  require(iid_peak_load_mbps > 0.0, "iid_peak_load_mbps must be positive");
  require(state_width >= 12, "state_width must be >= 12");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Layout build_layout(const ScenarioConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, Stream::kLayout);
  Layout layout;
  layout.mbs = {0.0, 0.0};

  for (int n = 0; n < config.n_sbs; ++n) {
    Point p{};
    for (int attempt = 0; attempt < 1000; ++attempt) {
      p = sample_annulus(layout.mbs, config.sbs_ring_min_m, config.sbs_ring_max_m, rng);
      bool ok = true;
      for (const auto& q : layout.sbs) ok = ok && distance(p, q) >= config.min_sbs_spacing_m;
      if (ok) break;
    }
    layout.sbs.push_back(p);
  }

  std::uniform_int_distribution<int> ue_count(config.ues_per_sbs_min, config.ues_per_sbs_max);
  std::uniform_int_distribution<std::size_t> peak_pick(0, config.peak_load_choices_mbps.size() - 1);
  const int iid_count = (config.ues_per_sbs_min + config.ues_per_sbs_max) / 2;
  std::vector<Point> iid_offsets;
  if (config.iid) {
    for (int k = 0; k < iid_count; ++k) {
      iid_offsets.push_back(
          sample_annulus({0.0, 0.0}, config.ue_radius_min_m, config.ue_radius_max_m, rng));
    }
  }

  layout.sbs_ues.resize(config.n_sbs);
  for (int n = 0; n < config.n_sbs; ++n) {
    const int count = config.iid ? iid_count : ue_count(rng);
    layout.peak_load_mbps.push_back(config.iid ? config.iid_peak_load_mbps
                                               : config.peak_load_choices_mbps[peak_pick(rng)]);
    for (int k = 0; k < count; ++k) {
      Point p = config.iid ? Point{layout.sbs[n].x + iid_offsets[k].x, layout.sbs[n].y + iid_offsets[k].y}
                           : sample_annulus(layout.sbs[n], config.ue_radius_min_m,
                                            config.ue_radius_max_m, rng);
      layout.sbs_ues[n].push_back(static_cast<int>(layout.ues.size()));
      layout.ues.push_back(p);
      layout.ue_home.push_back(n);
    }
  }
  for (int k = 0; k < config.mbs_ues; ++k) {
    layout.macro_ues.push_back(static_cast<int>(layout.ues.size()));
    layout.ues.push_back(
        sample_annulus(layout.mbs, config.mbs_ue_radius_min_m, config.mbs_ue_radius_max_m, rng));
    layout.ue_home.push_back(-1);
  }

  layout.sbs_gain.assign(config.n_sbs, std::vector<double>(layout.ues.size()));
  for (int n = 0; n < config.n_sbs; ++n) {
    for (std::size_t m = 0; m < layout.ues.size(); ++m) {
      layout.sbs_gain[n][m] = gain_from_distance(std::max(1.0, distance(layout.sbs[n], layout.ues[m])));
    }
  }
  for (int k = 0; k < config.neighbour_macro_sites; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / config.neighbour_macro_sites + std::numbers::pi / 6.0;
    layout.neighbour_mbs.push_back(polar(layout.mbs, config.macro_isd_m, theta));
  }
  for (const auto& ue : layout.ues) {
    layout.mbs_gain.push_back(gain_from_distance(std::max(1.0, distance(layout.mbs, ue))));
    double g = 0.0;
    for (const auto& site : layout.neighbour_mbs) g += gain_from_distance(std::max(1.0, distance(site, ue)));
    layout.neighbour_mbs_gain.push_back(g);
  }
  return layout;
}

}  // namespace fedsleep::radio
