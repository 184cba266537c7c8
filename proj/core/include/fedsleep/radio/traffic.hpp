#pragma once

#include <cstdint>
#include <vector>

#include "fedsleep/radio/scenario.hpp"

namespace fedsleep::radio {

/// Fraction of peak load at `hour` in [0, 24): 1 at the peak hour, the trough
/// fraction at the trough hour, half-cosine ramps in between.
double diurnal_fraction(const ScenarioConfig& config, double hour);

/// Simulated hour of day at absolute TTI `clock`.
double hour_of_day(const ScenarioConfig& config, std::int64_t clock);

/// Mean offered load of SBS `n` at `clock`, in bits/s.
double sbs_offered_bps(const ScenarioConfig& config, const Layout& layout, int n, std::int64_t clock);

/// Mean offered load of the macro users at `clock`, in bits/s.
double macro_offered_bps(const ScenarioConfig& config, std::int64_t clock);

/// Poisson-batched packet arrivals (bits) for every UE in TTI `clock`. Each
/// SBS's load is split evenly over its UEs. Depends only on
/// (config.seed, clock).
std::vector<double> generate_traffic(const ScenarioConfig& config, const Layout& layout,
                                     std::int64_t clock);

}  // namespace fedsleep::radio
