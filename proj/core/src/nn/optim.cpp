#include "fedsleep/nn/optim.hpp"

#include <cmath>

namespace fedsleep::nn {

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr) {
  ParamVector out = params;
  out.axpy(-lr, grad);
  return out;
}

double clip_grad_norm(ParamVector& grad, double max_norm) {
  const double n = grad.norm();
  if (max_norm > 0.0 && n > max_norm) grad *= max_norm / n;
  return n;
}

void Adam::step(ParamVector& params, const ParamVector& grad) {
  require_same_shape(params, grad, "Adam::step");
  if (m_.size() != params.size()) {
    m_ = ParamVector(params.shapes());
    v_ = ParamVector(params.shapes());
    t_ = 0;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto p = params.values();
  auto g = grad.values();
  auto m = m_.values();
  auto v = v_.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
    v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
    p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
  }
}

}  // namespace fedsleep::nn
