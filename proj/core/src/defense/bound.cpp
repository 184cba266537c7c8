#include "fedsleep/defense/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/ops.hpp"

namespace fedsleep::defense {

double e_zero(double q1, double q2) {
  if (q1 < q2) throw DomainError("e_zero requires q1 >= q2");
  const double a = std::exp(q1), b = std::exp(q2), s = a + b;
  return -s * std::log(s) + a * std::log(2.0 * a) + b * std::log(2.0 * b);
}

BoundResult attack_effect_bound_top2(std::span<const std::pair<double, double>> top2, double theta) {
  if (top2.empty()) throw DomainError("attack_effect_bound: empty batch");
  if (theta < 0.0) throw DomainError("attack_effect_bound: theta must be non-negative");
  BoundResult r;
  for (const auto& [q1, q2] : top2) r.mean_e0 += e_zero(q1, q2);
  r.mean_e0 /= static_cast<double>(top2.size());
  if (theta == 0.0) return r;
  if (r.mean_e0 <= 0.0) {
    r.p_no = 1.0;
    r.degenerate = true;
    return r;
  }
  r.p_no = std::min(1.0, theta / r.mean_e0);
  return r;
}

namespace {

std::pair<double, double> top_two_log_probs(const std::array<double, 3>& q) {
  auto lp = nn::log_softmax(q);
  std::sort(lp.begin(), lp.end(), std::greater<>());
  return {lp[0], lp[1]};
}

}  // namespace

BoundResult attack_effect_bound(std::span<const std::array<double, 3>> q, double theta) {
  std::vector<std::pair<double, double>> top2;
  top2.reserve(q.size());
  for (const auto& t : q) top2.push_back(top_two_log_probs(t));
  return attack_effect_bound_top2(top2, theta);
}

double e_zero_numeric(const std::array<double, 3>& q) {
  const auto p = nn::softmax(q);
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (p[i] > p[best]) best = i;
  }
  double overall = INFINITY;
  for (int rival = 0; rival < 3; ++rival) {
    if (rival == best) continue;
    const int other = 3 - best - rival;
    // p'[best] = p'[rival] = t, p'[other] = 1 - 2t.
    auto kl = [&](double t) {
      const double rest = 1.0 - 2.0 * t;
      double v = p[best] * std::log(p[best] / t) + p[rival] * std::log(p[rival] / t);
      if (p[other] > 0.0) v += p[other] * std::log(p[other] / rest);
      return v;
    };
    constexpr int kGrid = 2000;
    const double lo = 1e-15, hi = 0.5 - 1e-15;
    int arg = 1;
    double arg_val = INFINITY;
    for (int k = 1; k < kGrid; ++k) {
      const double v = kl(lo + (hi - lo) * k / kGrid);
      if (v < arg_val) arg_val = v, arg = k;
    }
    double a = lo + (hi - lo) * (arg - 1) / kGrid, b = lo + (hi - lo) * (arg + 1) / kGrid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = kl(c), fd = kl(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      if (fc < fd) {
        b = d, d = c, fd = fc;
        c = b - g * (b - a), fc = kl(c);
      } else {
        a = c, c = d, fc = fd;
        d = a + g * (b - a), fd = kl(d);
      }
    }
    overall = std::min({overall, fc, fd, arg_val});
  }
  return overall;
}

AdversaryResult budgeted_flip_adversary(std::span<const std::array<double, 3>> q, double theta, Rng& rng) {
  AdversaryResult res;
  res.states = q.size();
  double budget = theta * static_cast<double>(q.size());
  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  for (std::size_t idx : order) {
    const auto p = nn::softmax(q[idx]);
    std::array<int, 3> rank{0, 1, 2};
    std::sort(rank.begin(), rank.end(), [&](int a, int b) { return p[a] != p[b] ? p[a] > p[b] : a < b; });
    const int best = rank[0], second = rank[1];
    // Cheapest flip: pool the top two, then tip the balance by a hair so the
    // runner-up wins outright.
    const double m = 0.5 * (p[best] + p[second]);
    const double tip = 1e-12 * m;
    std::vector<double> pp(p.begin(), p.end());
    pp[best] = m - tip;
    pp[second] = m + tip;
    double kl = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (p[i] > 0.0) kl += p[i] * std::log(p[i] / pp[i]);
    }
    kl = std::max(kl, 0.0);
    if (kl > budget) break;
    int new_best = 0;
    for (int i = 1; i < 3; ++i) {
      if (pp[i] > pp[new_best]) new_best = i;
    }
    if (new_best == best) continue;
    budget -= kl;
    res.kl_spent += kl;
    ++res.flipped;
  }
  return res;
}

}  // namespace fedsleep::defense
