#include "fedsleep/exp/pca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "fedsleep/common/error.hpp"

namespace fedsleep::exp {

PcaResult pca_project(const nn::Matrix& x) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (n < 3) throw DomainError("pca_project needs at least three rows");
  const nn::RowVector mu = x.colwise().mean();
  const nn::Matrix c = x.rowwise() - mu;

  // Eigenvectors of the N x N Gram matrix give the components without forming
  // the D x D covariance.
  const Eigen::MatrixXd gram = c * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd lambda = eig.eigenvalues();  // ascending
  const double top = std::max(lambda(n - 1), 0.0);
  const double tol = std::max(1e-12 * top, 1e-300);

  PcaResult out;
  out.points = nn::Matrix::Zero(n, 2);
  out.components = nn::Matrix::Zero(2, d);
  out.explained.assign(2, 0.0);
  for (int k = 0; k < 2; ++k) {
    const double l = lambda(n - 1 - k);
    if (!(l > tol) || top == 0.0) {
      out.degenerate = true;
      continue;
    }
    Eigen::VectorXd v = c.transpose() * eig.eigenvectors().col(n - 1 - k);
    v /= v.norm();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.components.row(k) = v.transpose();
    out.points.col(k) = c * v;
    out.explained[k] = l / static_cast<double>(n - 1);
  }
  return out;
}

PcaResult pca_project(std::span<const nn::ParamVector> vectors) {
  if (vectors.empty()) throw DomainError("pca_project: no vectors");
  nn::Matrix x(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(vectors[0].size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require_same_shape(vectors[0], vectors[i], "pca_project");
    for (std::size_t j = 0; j < vectors[i].size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[i][j];
    }
  }
  return pca_project(x);
}

double min_cross_distance(const nn::Matrix& p, const std::vector<int>& a, const std::vector<int>& b) {
  double best = INFINITY;
  for (int i : a) {
    for (int j : b) best = std::min(best, (p.row(i) - p.row(j)).norm());
  }
  return best;
}

double max_within_distance(const nn::Matrix& p, const std::vector<int>& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) worst = std::max(worst, (p.row(a[i]) - p.row(a[j])).norm());
  }
  return worst;
}

}  // namespace fedsleep::exp
