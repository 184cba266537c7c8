#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedsleep/exp/config.hpp"
#include "fedsleep/exp/metrics.hpp"
#include "fedsleep/fed/federation.hpp"

namespace fedsleep::exp {

struct SeedResult {
  std::uint64_t seed = 0;
  MetricsLog log;
  /// Submissions of the final aggregation round (empty without aggregation).
  fed::Checkpoint last_round;
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  MetricsLog log;                  // merged in seed order
  std::vector<SeedResult> seeds;   // in config order
};

/// Progress callback: (seed, episode) after every finished episode.
using ProgressFn = std::function<void(std::uint64_t, int)>;

/// One seed of the federated sleep-control loop. Deterministic in
/// (config, seed). A numeric failure ends the seed early with `failed` set
/// and the rows logged so far kept.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const ProgressFn& progress = {});

/// Every seed, fanned out over config.workers threads.
ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

}  // namespace fedsleep::exp
