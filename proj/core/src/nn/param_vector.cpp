#include "fedsleep/nn/param_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsleep/common/error.hpp"

namespace fedsleep::nn {

std::size_t total_param_count(const std::vector<LayerShape>& shapes) {
  std::size_t n = 0;
  for (const auto& s : shapes) n += s.param_count();
  return n;
}

ParamVector::ParamVector(std::vector<LayerShape> shapes, int id)
    : shapes_(std::move(shapes)), values_(total_param_count(shapes_), 0.0), id_(id) {}

ParamVector::ParamVector(std::vector<LayerShape> shapes, std::vector<double> values, int id)
    : shapes_(std::move(shapes)), values_(std::move(values)), id_(id) {
  if (values_.size() != total_param_count(shapes_)) {
    throw ShapeError("ParamVector: " + std::to_string(values_.size()) +
                     " values do not match layer shapes totalling " +
                     std::to_string(total_param_count(shapes_)));
  }
}

std::size_t ParamVector::layer_offset(std::size_t l) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < l; ++i) off += shapes_.at(i).param_count();
  return off;
}

std::span<double> ParamVector::layer(std::size_t l) {
  return std::span<double>(values_).subspan(layer_offset(l), shapes_.at(l).param_count());
}

std::span<const double> ParamVector::layer(std::size_t l) const {
  return std::span<const double>(values_).subspan(layer_offset(l), shapes_.at(l).param_count());
}

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const ParamVector& a, const ParamVector& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": parameter shapes differ (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + " values)");
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& rhs) {
  require_same_shape(*this, rhs, "ParamVector::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& rhs) {
  require_same_shape(*this, rhs, "ParamVector::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void ParamVector::axpy(double a, const ParamVector& x) {
  require_same_shape(*this, x, "ParamVector::axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
}

void ParamVector::fill(double v) {
  for (double& x : values_) x = v;
}

double ParamVector::dot(const ParamVector& rhs) const {
  require_same_shape(*this, rhs, "ParamVector::dot");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * rhs.values_[i];
  return s;
}

double ParamVector::norm() const { return std::sqrt(squared_norm()); }

ParamVector operator+(ParamVector lhs, const ParamVector& rhs) { return lhs += rhs; }
ParamVector operator-(ParamVector lhs, const ParamVector& rhs) { return lhs -= rhs; }
ParamVector operator*(double s, ParamVector v) { return v *= s; }

double distance(const ParamVector& a, const ParamVector& b) {
  require_same_shape(a, b, "distance");
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    s += d * d;
  }
  return std::sqrt(s);
}

ParamVector mean(std::span<const ParamVector> vectors) {
  if (vectors.empty()) throw ShapeError("mean: no vectors");
  for (const auto& v : vectors) require_same_shape(vectors.front(), v, "mean");

  // Per coordinate: mean = min + sum(sorted(x - min)) / k. The result does not
  // depend on submission order and k identical inputs return that input exactly.
  ParamVector out(vectors.front().shapes());
  auto acc = out.values();
  const std::size_t k = vectors.size();
  std::vector<double> column(k);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double lo = vectors[0][i];
    for (std::size_t j = 1; j < k; ++j) lo = std::min(lo, vectors[j][i]);
    for (std::size_t j = 0; j < k; ++j) column[j] = vectors[j][i] - lo;
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (double d : column) s += d;
    acc[i] = lo + s / static_cast<double>(k);
  }
  return out;
}

}  // namespace fedsleep::nn
