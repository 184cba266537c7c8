#pragma once

#include <span>
#include <vector>

#include "fedsleep/fed/federation.hpp"

namespace fedsleep::defense {

/// D_n: mean over k != n of ||G_n - G_k||_2 with G_n = theta_n - prev_global.
/// Returned in submission order.
std::vector<double> average_distances(std::span<const fed::SubmissionView> submissions,
                                      const nn::ParamVector& prev_global);

/// Id of the submission with the smallest D_n; ties go to the lowest id.
int krum_select(std::span<const fed::SubmissionView> submissions, const nn::ParamVector& prev_global);

/// The k ids with the smallest D_n (ties by id), in ascending id order.
std::vector<int> coarse_reliable_set(std::span<const fed::SubmissionView> submissions,
                                     const nn::ParamVector& prev_global, std::size_t k);

}  // namespace fedsleep::defense
