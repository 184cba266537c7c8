#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

using LossFn = std::function<double(const ParamVector&)>;

/// Central finite differences against an analytic gradient. The relative error
/// of a coordinate is |a - n| / max(|a|, |n|, abs_floor). When `coords` is
/// non-empty only those indices are checked.
GradCheckResult grad_check(const LossFn& loss, const ParamVector& analytic_grad,
                           const ParamVector& params, double step = 1e-5,
                           const std::vector<std::size_t>& coords = {}, double abs_floor = 1e-6);

}  // namespace fedsleep::nn
