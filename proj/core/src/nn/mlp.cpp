#include "fedsleep/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "fedsleep/common/error.hpp"

namespace fedsleep::nn {

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const RowVector>;
using RowMap = Eigen::Map<RowVector>;

void check_params(const ParamVector& params, const MlpSpec& spec) {
  if (params.shapes() != spec.layer_shapes()) {
    throw ShapeError("MLP parameters do not match spec (" + std::to_string(params.size()) +
                     " values, spec wants " + std::to_string(spec.param_count()) + ")");
  }
}

}  // namespace

std::vector<LayerShape> MlpSpec::layer_shapes() const {
  std::vector<LayerShape> shapes;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    shapes.push_back({widths[l], widths[l + 1], true});
  }
  return shapes;
}

void MlpSpec::validate() const {
  if (widths.size() < 3) throw ShapeError("MlpSpec needs an input, >=1 hidden and an output width");
  for (int w : widths) {
    if (w <= 0) throw ShapeError("MlpSpec widths must be positive");
  }
}

ParamVector init_params(const MlpSpec& spec, Rng& rng, int id) {
  spec.validate();
  ParamVector p(spec.layer_shapes(), id);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const auto& shape = p.shapes()[l];
    const double limit = std::sqrt(6.0 / (shape.in_width + shape.out_width));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto block = p.layer(l);
    for (std::size_t i = 0; i < shape.weight_count(); ++i) block[i] = dist(rng);
  }
  return p;
}

Matrix forward_batch(const ParamVector& params, const MlpSpec& spec, const Matrix& input,
                     ForwardCache* cache) {
  check_params(params, spec);
  if (input.cols() != spec.input_width()) {
    throw ShapeError("MLP input width " + std::to_string(input.cols()) + ", expected " +
                     std::to_string(spec.input_width()));
  }
  if (cache) {
    cache->activations.clear();
    cache->pre_activations.clear();
    cache->activations.push_back(input);
  }
  Matrix a = input;
  const std::size_t layers = spec.layer_count();
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& shape = params.shapes()[l];
    ConstMatrixMap w(params.values().data() + offset, shape.out_width, shape.in_width);
    ConstRowMap b(params.values().data() + offset + shape.weight_count(), shape.out_width);
    offset += shape.param_count();

    Matrix z(a.rows(), shape.out_width);
    z.noalias() = a * w.transpose();
    z.rowwise() += b;
    if (l + 1 == layers) {
      if (cache) cache->pre_activations.push_back(z);
      return z;
    }
    if (cache) cache->pre_activations.push_back(z);
    a = z.cwiseMax(0.0);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

ParamVector backward_batch(const ParamVector& params, const MlpSpec& spec, const ForwardCache& cache,
                           const Matrix& upstream, Matrix* input_grad) {
  check_params(params, spec);
  const std::size_t layers = spec.layer_count();
  if (cache.activations.size() != layers || cache.pre_activations.size() != layers) {
    throw ShapeError("backward_batch: cache does not come from this network");
  }
  if (upstream.cols() != spec.output_width() || upstream.rows() != cache.activations[0].rows()) {
    throw ShapeError("backward_batch: upstream gradient shape mismatch");
  }

  ParamVector grad(params.shapes());
  Matrix delta = upstream;
  for (std::size_t li = layers; li-- > 0;) {
    const auto& shape = params.shapes()[li];
    const std::size_t offset = params.layer_offset(li);
    ConstMatrixMap w(params.values().data() + offset, shape.out_width, shape.in_width);
    MatrixMap gw(grad.values().data() + offset, shape.out_width, shape.in_width);
    RowMap gb(grad.values().data() + offset + shape.weight_count(), shape.out_width);

    const Matrix& a_prev = cache.activations[li];
    gw.noalias() = delta.transpose() * a_prev;
    gb = delta.colwise().sum();

    if (li == 0 && input_grad == nullptr) break;
    Matrix da(delta.rows(), shape.in_width);
    da.noalias() = delta * w;
    if (li == 0) {
      *input_grad = std::move(da);
      break;
    }
    const Matrix& z_prev = cache.pre_activations[li - 1];
    delta = (z_prev.array() > 0.0).select(da, 0.0);
  }
  return grad;
}

std::vector<double> mlp_forward(const ParamVector& params, const MlpSpec& spec,
                                std::span<const double> input) {
  if (static_cast<int>(input.size()) != spec.input_width()) {
    throw ShapeError("mlp_forward: input width " + std::to_string(input.size()) + ", expected " +
                     std::to_string(spec.input_width()));
  }
  Matrix x = Eigen::Map<const Matrix>(input.data(), 1, static_cast<Eigen::Index>(input.size()));
  Matrix y = forward_batch(params, spec, x);
  return std::vector<double>(y.data(), y.data() + y.size());
}

ParamVector mlp_backward(const ParamVector& params, const MlpSpec& spec,
                         std::span<const double> input, std::span<const double> upstream) {
  if (static_cast<int>(input.size()) != spec.input_width() ||
      static_cast<int>(upstream.size()) != spec.output_width()) {
    throw ShapeError("mlp_backward: input or upstream width mismatch");
  }
  Matrix x = Eigen::Map<const Matrix>(input.data(), 1, static_cast<Eigen::Index>(input.size()));
  ForwardCache cache;
  forward_batch(params, spec, x, &cache);
  Matrix g = Eigen::Map<const Matrix>(upstream.data(), 1, static_cast<Eigen::Index>(upstream.size()));
  return backward_batch(params, spec, cache, g);
}

Matrix stack_rows(std::span<const std::vector<double>> rows) {
  if (rows.empty()) return Matrix(0, 0);
  const auto width = static_cast<Eigen::Index>(rows.front().size());
  Matrix m(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != width) {
      throw ShapeError("stack_rows: ragged rows");
    }
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const RowVector>(rows[i].data(), width);
  }
  return m;
}

}  // namespace fedsleep::nn
