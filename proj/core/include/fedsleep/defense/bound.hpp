#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "fedsleep/common/rng.hpp"

namespace fedsleep::defense {

/// Minimal KL(p || p') needed to make the runner-up action at least as likely
/// as the best one, where p_i = exp(q_i) (q are log-probabilities):
///   -(e^q1 + e^q2) ln(e^q1 + e^q2) + e^q1 ln(2 e^q1) + e^q2 ln(2 e^q2).
/// Requires q1 >= q2.
double e_zero(double q1, double q2);

struct BoundResult {
  double p_no = 0.0;      // min(1, theta / mean E0)
  double mean_e0 = 0.0;
  bool degenerate = false;  // mean E0 == 0
};

/// Bound from the top-two values of each state, used as given.
BoundResult attack_effect_bound_top2(std::span<const std::pair<double, double>> top2, double theta);

/// Bound over raw Q triples: each triple is turned into log-probabilities with
/// log-softmax before its top two enter e_zero.
BoundResult attack_effect_bound(std::span<const std::array<double, 3>> q, double theta);

/// Numerical reference for e_zero: minimises KL(softmax(q) || p') over
/// distributions p' whose top probability is no longer on argmax(q). The
/// minimum lies where the best action ties with one rival, so each rival's
/// tie line is searched on a grid and refined by golden-section search.
double e_zero_numeric(const std::array<double, 3>& q);

/// Result of a budgeted flipping adversary.
struct AdversaryResult {
  std::size_t flipped = 0;
  std::size_t states = 0;
  double kl_spent = 0.0;
  double flipped_fraction() const { return states ? static_cast<double>(flipped) / states : 0.0; }
};

/// Adversary with a total KL budget theta * |X| over the batch. It visits the
/// states in random order and, for each, replaces the output distribution by
/// the cheapest one whose argmax is the runner-up, stopping at the first
/// state the remaining budget cannot pay for. Every flip is verified against the modified distribution.
AdversaryResult budgeted_flip_adversary(std::span<const std::array<double, 3>> q, double theta, Rng& rng);

}  // namespace fedsleep::defense
