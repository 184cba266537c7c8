#pragma once

namespace fedsleep::radio {

/// 128.1 + 37.6 log10(d / 1 km) dB. Throws DomainError for d <= 0.
double path_loss_db(double distance_m);

/// Linear channel gain 10^(-PL/10).
double gain_from_distance(double distance_m);

double dbm_to_watts(double dbm);

/// Thermal noise power over `bandwidth_hz`, in watts.
double noise_watts(double noise_density_dbm_hz, double noise_figure_db, double bandwidth_hz);

/// Shannon rate of one PRB in bits/s.
double prb_rate(double prb_bandwidth_hz, double sinr);

}  // namespace fedsleep::radio
