#pragma once

#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::nn {

/// params - lr * grad.
ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr);

/// Rescales `grad` in place so its L2 norm is at most `max_norm` (no-op when
/// max_norm <= 0). Returns the norm before clipping.
double clip_grad_norm(ParamVector& grad, double max_norm);

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamVector& params, const ParamVector& grad);
  void reset() { t_ = 0; m_ = {}; v_ = {}; }
  double lr() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  ParamVector m_, v_;
};

}  // namespace fedsleep::nn
