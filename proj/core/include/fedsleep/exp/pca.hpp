#pragma once

#include <span>
#include <vector>

#include "fedsleep/nn/mlp.hpp"
#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::exp {

struct PcaResult {
  nn::Matrix points;                // N x 2
  nn::Matrix components;            // 2 x D, unit rows
  std::vector<double> explained;    // variance along each component
  bool degenerate = false;          // rank below two
};

/// Projects the rows of `x` (N x D, N >= 3) onto their two leading principal
/// components. Each component's largest-magnitude entry is made positive.
PcaResult pca_project(const nn::Matrix& x);

/// Convenience overload over parameter vectors.
PcaResult pca_project(std::span<const nn::ParamVector> vectors);

/// min over (i in a, j in b) of ||p_i - p_j|| and max over pairs inside a.
double min_cross_distance(const nn::Matrix& points, const std::vector<int>& a, const std::vector<int>& b);
double max_within_distance(const nn::Matrix& points, const std::vector<int>& a);

}  // namespace fedsleep::exp
