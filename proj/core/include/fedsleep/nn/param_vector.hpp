#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedsleep::nn {

/// One dense layer: `out x in` weight matrix (row-major) followed by `out`
/// biases when `has_bias` is set.
struct LayerShape {
  int in_width = 0;
  int out_width = 0;
  bool has_bias = true;

  std::size_t weight_count() const { return static_cast<std::size_t>(in_width) * out_width; }
  std::size_t param_count() const { return weight_count() + (has_bias ? out_width : 0); }

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Flat parameter vector with layer metadata. This is the unit exchanged in a
/// federated round and the object every attack and defense manipulates.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<LayerShape> shapes, int id = -1);
  ParamVector(std::vector<LayerShape> shapes, std::vector<double> values, int id = -1);

  std::size_t size() const { return values_.size(); }
  const std::vector<LayerShape>& shapes() const { return shapes_; }
  int id() const { return id_; }
  void set_id(int id) { id_ = id; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Offset of layer `l`'s first weight inside the flat vector.
  std::size_t layer_offset(std::size_t l) const;
  std::span<double> layer(std::size_t l);
  std::span<const double> layer(std::size_t l) const;

  bool same_shape(const ParamVector& other) const { return shapes_ == other.shapes_; }
  bool all_finite() const;

  ParamVector& operator+=(const ParamVector& rhs);
  ParamVector& operator-=(const ParamVector& rhs);
  ParamVector& operator*=(double s);
  void axpy(double a, const ParamVector& x);  // this += a * x
  void fill(double v);

  double dot(const ParamVector& rhs) const;
  double squared_norm() const { return dot(*this); }
  double norm() const;

 private:
  std::vector<LayerShape> shapes_;
  std::vector<double> values_;
  int id_ = -1;
};

ParamVector operator+(ParamVector lhs, const ParamVector& rhs);
ParamVector operator-(ParamVector lhs, const ParamVector& rhs);
ParamVector operator*(double s, ParamVector v);

double distance(const ParamVector& a, const ParamVector& b);

/// Coordinatewise arithmetic mean. Independent of input order bit for bit.
ParamVector mean(std::span<const ParamVector> vectors);

std::size_t total_param_count(const std::vector<LayerShape>& shapes);

/// Throws ShapeError when shapes differ.
void require_same_shape(const ParamVector& a, const ParamVector& b, const char* what);

}  // namespace fedsleep::nn
