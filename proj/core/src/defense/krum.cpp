#include "fedsleep/defense/krum.hpp"

#include <algorithm>
#include <numeric>

#include "fedsleep/common/error.hpp"

namespace fedsleep::defense {

std::vector<double> average_distances(std::span<const fed::SubmissionView> submissions,
                                      const nn::ParamVector& prev_global) {
  const std::size_t n = submissions.size();
  std::vector<nn::ParamVector> updates;
  updates.reserve(n);
  for (const auto& s : submissions) updates.push_back(*s.params - prev_global);
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<std::vector<double>> pair(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pair[i][j] = pair[j][i] = nn::distance(updates[i], updates[j]);
  }
  // Sum in ascending id order so the result does not depend on input order.
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return submissions[a].participant_id < submissions[b].participant_id; });
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j : by_id) {
      if (j != i) s += pair[i][j];
    }
    d[i] = s / static_cast<double>(n - 1);
  }
  return d;
}

namespace {

std::vector<std::size_t> ranked(std::span<const fed::SubmissionView> submissions, const std::vector<double>& d) {
  std::vector<std::size_t> order(submissions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d[a] != d[b] ? d[a] < d[b] : submissions[a].participant_id < submissions[b].participant_id;
  });
  return order;
}

}  // namespace

int krum_select(std::span<const fed::SubmissionView> submissions, const nn::ParamVector& prev_global) {
  if (submissions.size() < 2) throw DomainError("krum_select needs at least two submissions");
  const auto d = average_distances(submissions, prev_global);
  return submissions[ranked(submissions, d).front()].participant_id;
}

std::vector<int> coarse_reliable_set(std::span<const fed::SubmissionView> submissions,
                                     const nn::ParamVector& prev_global, std::size_t k) {
  if (k > submissions.size()) throw DomainError("reliable set larger than the number of submissions");
  const auto d = average_distances(submissions, prev_global);
  const auto order = ranked(submissions, d);
  std::vector<int> ids;
  for (std::size_t i = 0; i < k; ++i) ids.push_back(submissions[order[i]].participant_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace fedsleep::defense
