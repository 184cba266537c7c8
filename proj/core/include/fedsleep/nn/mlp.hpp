#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedsleep/common/rng.hpp"
#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Dense network: ReLU on every hidden layer, linear output.
/// `widths` = {input, hidden..., output}.
struct MlpSpec {
  std::vector<int> widths;

  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }
  std::size_t layer_count() const { return widths.size() - 1; }
  std::vector<LayerShape> layer_shapes() const;
  std::size_t param_count() const { return total_param_count(layer_shapes()); }

  /// Throws ShapeError unless there is at least one hidden layer and every
  /// width is positive.
  void validate() const;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
ParamVector init_params(const MlpSpec& spec, Rng& rng, int id = -1);

/// Single-sample forward pass.
std::vector<double> mlp_forward(const ParamVector& params, const MlpSpec& spec,
                                std::span<const double> input);

/// Gradient of <upstream, f(input)> with respect to the parameters.
ParamVector mlp_backward(const ParamVector& params, const MlpSpec& spec,
                         std::span<const double> input, std::span<const double> upstream);

/// Activations kept from a batched forward pass; `activations[0]` is the input.
struct ForwardCache {
  std::vector<Matrix> activations;
  std::vector<Matrix> pre_activations;
};

/// Batched forward pass, one sample per row.
Matrix forward_batch(const ParamVector& params, const MlpSpec& spec, const Matrix& input,
                     ForwardCache* cache = nullptr);

/// Backward pass over a cached batch. `upstream` is dL/d(output), one row per
/// sample. Writes dL/d(input) into `input_grad` when it is non-null.
ParamVector backward_batch(const ParamVector& params, const MlpSpec& spec, const ForwardCache& cache,
                           const Matrix& upstream, Matrix* input_grad = nullptr);

/// Copies `rows` into a batch matrix (all rows must share one width).
Matrix stack_rows(std::span<const std::vector<double>> rows);

}  // namespace fedsleep::nn
