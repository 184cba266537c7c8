#include "fedsleep/radio/channel.hpp"

#include <cmath>
#include <string>

#include "fedsleep/common/error.hpp"

namespace fedsleep::radio {

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("path_loss_db: distance must be positive, got " + std::to_string(distance_m));
  }
  return 128.1 + 37.6 * std::log10(distance_m / 1000.0);
}

double gain_from_distance(double distance_m) {
  return std::pow(10.0, -path_loss_db(distance_m) / 10.0);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double noise_watts(double noise_density_dbm_hz, double noise_figure_db, double bandwidth_hz) {
  return dbm_to_watts(noise_density_dbm_hz + noise_figure_db) * bandwidth_hz;
}

double prb_rate(double prb_bandwidth_hz, double sinr) {
  return prb_bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace fedsleep::radio
