#include "fedsleep/attack/regularization.hpp"

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/optim.hpp"

namespace fedsleep::attack {

agent::TdResult complement_loss_and_grad(const nn::ParamVector& params, const nn::ParamVector& target,
                                         const nn::MlpSpec& spec, const agent::TdBatch& batch, double gamma) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) return {0.0, nn::ParamVector(params.shapes())};
  nn::ForwardCache cache;
  const nn::Matrix q = nn::forward_batch(params, spec, batch.s, &cache);
  const nn::Matrix q_next = nn::forward_batch(target, spec, batch.s_next);
  nn::Matrix upstream = nn::Matrix::Zero(n, q.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = batch.r[i] + gamma * q_next.row(i).maxCoeff();
    const double sum = q(i, batch.a[i]) + y;
    loss += sum * sum;
    upstream(i, batch.a[i]) = 2.0 * sum / static_cast<double>(n);
  }
  return {loss / static_cast<double>(n), nn::backward_batch(params, spec, cache, upstream)};
}

RegStep regularized_malicious_update(const nn::ParamVector& local, const nn::ParamVector& global,
                                     const nn::ParamVector& target, const nn::MlpSpec& spec,
                                     const agent::TdBatch& batch, double gamma, double omega, double alpha,
                                     RegObjective objective, double clip) {
  if (batch.size() == 0) throw DomainError("regularized_malicious_update: empty batch");
  nn::require_same_shape(local, global, "regularized_malicious_update");
  agent::TdResult td = agent::td_loss_and_grad(local, target, spec, batch, gamma);
  RegStep out{local, td.loss};
  nn::ParamVector g;
  if (objective == RegObjective::kAscent) {
    g = std::move(td.grad);
    g *= -1.0;
  } else {
    g = complement_loss_and_grad(local, target, spec, batch, gamma).grad;
  }
  nn::clip_grad_norm(g, clip);
  out.params.axpy(-alpha, g);
  out.params.axpy(-2.0 * omega * alpha, local - global);
  return out;
}

}  // namespace fedsleep::attack
