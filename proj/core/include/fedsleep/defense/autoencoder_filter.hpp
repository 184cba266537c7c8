#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsleep/fed/federation.hpp"

namespace fedsleep::defense {

struct AeFilterConfig {
  std::vector<int> hidden{256};
  int latent_width = 64;
  double lr = 1e-3;
  int epochs = 200;
  /// 0 means ceil(N / 2).
  int reliable_set_size = 0;
};

struct AeFilterResult {
  std::vector<int> reliable_ids;
  std::vector<int> accepted_ids;             // ascending
  std::vector<double> reconstruction_error;  // submission order
  double mean_error = 0.0;
  bool fell_back = false;
};

/// Trains an autoencoder on the update vectors (theta - prev_global, scaled
/// by the RMS norm of the reliable updates) of `reliable_ids`, scores every
/// submission by its reconstruction error and accepts those at or below the
/// mean error. If nothing survives the reliable set is accepted.
/// `seed` fixes the autoencoder initialisation.
AeFilterResult autoencoder_filter(std::span<const fed::SubmissionView> submissions,
                                  const nn::ParamVector& prev_global, std::span<const int> reliable_ids,
                                  const AeFilterConfig& config, std::uint64_t seed);

/// Coarse reliable set followed by the autoencoder filter.
AeFilterResult two_step_filter(std::span<const fed::SubmissionView> submissions,
                               const nn::ParamVector& prev_global, const AeFilterConfig& config,
                               std::uint64_t seed);

}  // namespace fedsleep::defense
