#include "fedsleep/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "fedsleep/common/error.hpp"

namespace fedsleep::nn {

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double hi = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double q : logits) z += std::exp(q - hi);
  const double log_z = hi + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    z += out[i];
  }
  for (double& p : out) p /= z;
  return out;
}

double kl_divergence(std::span<const double> q_from, std::span<const double> q_to) {
  if (q_from.size() != q_to.size()) throw ShapeError("kl_divergence: length mismatch");
  const auto lp = log_softmax(q_from);
  const auto lq = log_softmax(q_to);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lq[i]);
  return kl;
}

std::vector<double> kl_grad_wrt_to(std::span<const double> q_from, std::span<const double> q_to) {
  if (q_from.size() != q_to.size()) throw ShapeError("kl_grad_wrt_to: length mismatch");
  auto p = softmax(q_from);
  auto q = softmax(q_to);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] -= p[i];
  return q;
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace fedsleep::nn
