#include "fedsleep/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace fedsleep::nn {

GradCheckResult grad_check(const LossFn& loss, const ParamVector& analytic_grad,
                           const ParamVector& params, double step,
                           const std::vector<std::size_t>& coords, double abs_floor) {
  require_same_shape(params, analytic_grad, "grad_check");
  GradCheckResult result;
  ParamVector probe = params;
  auto check = [&](std::size_t i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = loss(probe);
    probe[i] = orig - step;
    const double down = loss(probe);
    probe[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic_grad[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), abs_floor});
    const double rel = std::abs(a - numeric) / denom;
    if (rel >= result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = i;
      result.analytic = a;
      result.numeric = numeric;
    }
  };
  if (coords.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) check(i);
  } else {
    for (std::size_t i : coords) check(i);
  }
  return result;
}

}  // namespace fedsleep::nn
