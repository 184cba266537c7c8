#include "fedsleep/radio/traffic.hpp"

#include <cmath>
#include <numbers>

namespace fedsleep::radio {

double diurnal_fraction(const ScenarioConfig& c, double hour) {
  hour = std::fmod(hour, 24.0);
  if (hour < 0.0) hour += 24.0;
  const double rise = c.peak_hour - c.trough_hour;
  double shape;  // 0 at trough, 1 at peak
  if (hour >= c.trough_hour && hour <= c.peak_hour) {
    const double x = (hour - c.trough_hour) / rise;
    shape = 0.5 * (1.0 - std::cos(std::numbers::pi * x));
  } else {
    double since_peak = hour - c.peak_hour;
    if (since_peak < 0.0) since_peak += 24.0;
    const double x = since_peak / (24.0 - rise);
    shape = 0.5 * (1.0 + std::cos(std::numbers::pi * x));
  }
  return c.trough_fraction + (1.0 - c.trough_fraction) * shape;
}

double hour_of_day(const ScenarioConfig& config, std::int64_t clock) {
  const std::int64_t day = config.day_ttis();
  const std::int64_t t = ((clock % day) + day) % day;
  return 24.0 * static_cast<double>(t) / static_cast<double>(day);
}

double sbs_offered_bps(const ScenarioConfig& config, const Layout& layout, int n, std::int64_t clock) {
  return layout.peak_load_mbps.at(n) * 1e6 * diurnal_fraction(config, hour_of_day(config, clock));
}

double macro_offered_bps(const ScenarioConfig& config, std::int64_t clock) {
  return config.mbs_peak_load_mbps * 1e6 * diurnal_fraction(config, hour_of_day(config, clock));
}

std::vector<double> generate_traffic(const ScenarioConfig& config, const Layout& layout,
                                     std::int64_t clock) {
  Rng rng = make_rng(config.seed, Stream::kTraffic, static_cast<std::uint64_t>(clock));
  std::vector<double> arrivals(layout.ues.size(), 0.0);
  const double tti_s = config.tti_s();
  auto draw = [&](double mean_bits) {
    if (mean_bits <= 0.0) return 0.0;
    std::poisson_distribution<long> packets(mean_bits / config.packet_bits);
    return static_cast<double>(packets(rng)) * config.packet_bits;
  };
  for (int n = 0; n < layout.n_sbs(); ++n) {
    const auto& ues = layout.sbs_ues[n];
    if (ues.empty()) continue;
    const double per_ue = sbs_offered_bps(config, layout, n, clock) * tti_s / ues.size();
    for (int m : ues) arrivals[m] = draw(per_ue);
  }
  if (!layout.macro_ues.empty()) {
    const double per_ue = macro_offered_bps(config, clock) * tti_s / layout.macro_ues.size();
    for (int m : layout.macro_ues) arrivals[m] = draw(per_ue);
  }
  return arrivals;
}

}  // namespace fedsleep::radio
