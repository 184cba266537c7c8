#include "fedsleep/defense/autoencoder_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsleep/common/error.hpp"
#include "fedsleep/defense/krum.hpp"
#include "fedsleep/nn/autoencoder.hpp"

namespace fedsleep::defense {

AeFilterResult autoencoder_filter(std::span<const fed::SubmissionView> submissions,
                                  const nn::ParamVector& prev_global, std::span<const int> reliable_ids,
                                  const AeFilterConfig& config, std::uint64_t seed) {
  if (reliable_ids.empty()) throw DomainError("autoencoder_filter: empty reliable set");
  const std::size_t n = submissions.size();
  const auto width = static_cast<Eigen::Index>(prev_global.size());

  // Rows in ascending id order so training is independent of input order.
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return submissions[a].participant_id < submissions[b].participant_id; });

  std::vector<int> reliable(reliable_ids.begin(), reliable_ids.end());
  std::sort(reliable.begin(), reliable.end());

  nn::Matrix all(static_cast<Eigen::Index>(n), width);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& p = *submissions[by_id[r]].params;
    for (Eigen::Index c = 0; c < width; ++c) all(static_cast<Eigen::Index>(r), c) = p[c] - prev_global[c];
  }
  std::vector<Eigen::Index> reliable_rows;
  for (std::size_t r = 0; r < n; ++r) {
    if (std::binary_search(reliable.begin(), reliable.end(), submissions[by_id[r]].participant_id)) {
      reliable_rows.push_back(static_cast<Eigen::Index>(r));
    }
  }
  if (reliable_rows.size() != reliable.size()) throw DomainError("autoencoder_filter: unknown reliable id");

  double sq = 0.0;
  for (auto r : reliable_rows) sq += all.row(r).squaredNorm();
  const double rms = std::sqrt(sq / static_cast<double>(reliable_rows.size()));
  if (rms > 0.0) all /= rms;

  nn::Matrix train(static_cast<Eigen::Index>(reliable_rows.size()), width);
  for (std::size_t i = 0; i < reliable_rows.size(); ++i) train.row(static_cast<Eigen::Index>(i)) = all.row(reliable_rows[i]);

  Rng rng = make_rng(seed, Stream::kDefense);
  nn::Autoencoder ae(nn::AutoencoderSpec{static_cast<int>(width), config.hidden, config.latent_width}, rng);
  ae.train(train, config.epochs, config.lr);
  const auto sorted_err = ae.reconstruction_errors(all);

  AeFilterResult out;
  out.reliable_ids = reliable;
  out.reconstruction_error.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out.reconstruction_error[by_id[r]] = sorted_err[r];
  // min + mean of sorted offsets: identical errors give a mean equal to each.
  const double lo = *std::min_element(sorted_err.begin(), sorted_err.end());
  std::vector<double> offsets;
  for (double e : sorted_err) offsets.push_back(e - lo);
  std::sort(offsets.begin(), offsets.end());
  out.mean_error = lo + std::accumulate(offsets.begin(), offsets.end(), 0.0) / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!(sorted_err[r] > out.mean_error)) out.accepted_ids.push_back(submissions[by_id[r]].participant_id);
  }
  if (out.accepted_ids.empty()) {
    out.accepted_ids = reliable;
    out.fell_back = true;
  }
  return out;
}

AeFilterResult two_step_filter(std::span<const fed::SubmissionView> submissions,
                               const nn::ParamVector& prev_global, const AeFilterConfig& config,
                               std::uint64_t seed) {
  const std::size_t n = submissions.size();
  const std::size_t k = config.reliable_set_size > 0 ? static_cast<std::size_t>(config.reliable_set_size)
                                                     : (n + 1) / 2;
  const auto reliable = coarse_reliable_set(submissions, prev_global, std::min(k, n));
  return autoencoder_filter(submissions, prev_global, reliable, config, seed);
}

}  // namespace fedsleep::defense
