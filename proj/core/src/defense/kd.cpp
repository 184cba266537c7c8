#include "fedsleep/defense/kd.hpp"

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/ops.hpp"
#include "fedsleep/nn/optim.hpp"

namespace fedsleep::defense {

namespace {

std::span<const double> row(const nn::Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Gradient of mean KL(softmax(q_from) || softmax(q_to)) with respect to q_to.
nn::Matrix kl_upstream(const nn::Matrix& q_from, const nn::Matrix& q_to, double scale) {
  nn::Matrix up(q_to.rows(), q_to.cols());
  const double n = static_cast<double>(q_to.rows());
  for (Eigen::Index i = 0; i < q_to.rows(); ++i) {
    const auto g = nn::kl_grad_wrt_to(row(q_from, i), row(q_to, i));
    for (Eigen::Index j = 0; j < q_to.cols(); ++j) up(i, j) = scale * g[j] / n;
  }
  return up;
}

}  // namespace

double mean_kl(const nn::Matrix& q_from, const nn::Matrix& q_to) {
  if (q_from.rows() != q_to.rows() || q_from.cols() != q_to.cols()) throw ShapeError("mean_kl: shape mismatch");
  if (q_from.rows() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < q_from.rows(); ++i) s += nn::kl_divergence(row(q_from, i), row(q_to, i));
  return s / static_cast<double>(q_from.rows());
}

agent::TdResult mixed_loss_and_grad(const nn::ParamVector& local, const nn::ParamVector& target,
                                    const nn::ParamVector& meme, const nn::MlpSpec& spec,
                                    const agent::TdBatch& batch, double gamma, double xi) {
  agent::TdResult td = agent::td_loss_and_grad(local, target, spec, batch, gamma);
  nn::ForwardCache cache;
  const nn::Matrix q_local = nn::forward_batch(local, spec, batch.s, &cache);
  const nn::Matrix q_meme = nn::forward_batch(meme, spec, batch.s);
  const double kl = mean_kl(q_meme, q_local);
  nn::ParamVector g = nn::backward_batch(local, spec, cache, kl_upstream(q_meme, q_local, 1.0 - xi));
  g.axpy(xi, td.grad);
  return {xi * td.loss + (1.0 - xi) * kl, std::move(g)};
}

agent::TdResult meme_loss_and_grad(const nn::ParamVector& meme, const nn::ParamVector& local,
                                   const nn::MlpSpec& spec, const agent::TdBatch& batch) {
  nn::ForwardCache cache;
  const nn::Matrix q_meme = nn::forward_batch(meme, spec, batch.s, &cache);
  const nn::Matrix q_local = nn::forward_batch(local, spec, batch.s);
  const double kl = mean_kl(q_local, q_meme);
  return {kl, nn::backward_batch(meme, spec, cache, kl_upstream(q_local, q_meme, 1.0))};
}

KdReport kd_local_update(nn::ParamVector& local, nn::ParamVector& meme, const nn::ParamVector& target,
                         const nn::MlpSpec& spec, const agent::TdBatch& batch, double gamma,
                         const KdConfig& config, double alpha, double clip) {
  if (batch.size() == 0) throw DomainError("kd_local_update: empty batch");
  KdReport rep;
  rep.kl = mean_kl(nn::forward_batch(meme, spec, batch.s), nn::forward_batch(local, spec, batch.s));
  if (rep.kl < config.theta) {
    rep.local_distills = true;
    agent::TdResult r = mixed_loss_and_grad(local, target, meme, spec, batch, gamma, config.xi);
    nn::clip_grad_norm(r.grad, clip);
    local.axpy(-alpha, r.grad);
    rep.loss = r.loss;
  } else {
    agent::TdResult td = agent::td_loss_and_grad(local, target, spec, batch, gamma);
    agent::TdResult m = meme_loss_and_grad(meme, local, spec, batch);
    nn::clip_grad_norm(td.grad, clip);
    nn::clip_grad_norm(m.grad, clip);
    local.axpy(-alpha, td.grad);
    meme.axpy(-alpha, m.grad);
    rep.loss = td.loss;
  }
  return rep;
}

}  // namespace fedsleep::defense
