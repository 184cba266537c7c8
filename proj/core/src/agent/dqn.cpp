#include "fedsleep/agent/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/optim.hpp"
#include "fedsleep/radio/network.hpp"

namespace fedsleep::agent {

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("agent.gamma must lie in [0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("agent.epsilon must lie in [0, 1]");
  if (!(lr >= 0.0)) throw DomainError("agent.lr must be non-negative");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw DomainError("agent.lr_decay must lie in (0, 1]");
  if (batch < 1) throw DomainError("agent.batch must be positive");
  if (hidden.empty()) throw DomainError("agent.hidden needs at least one layer");
  for (int h : hidden) {
    if (h < 1) throw DomainError("agent.hidden widths must be positive");
  }
  if (target_sync_ttis < 1) throw DomainError("agent.target_sync_ttis must be positive");
  if (buffer_capacity < 1) throw DomainError("agent.buffer_capacity must be positive");
}

TdBatch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices) {
  TdBatch b;
  if (indices.empty()) return b;
  const auto w = static_cast<Eigen::Index>(buffer.at(indices[0]).s.size());
  const auto n = static_cast<Eigen::Index>(indices.size());
  b.s.resize(n, w);
  b.s_next.resize(n, w);
  b.a.resize(indices.size());
  b.r.resize(indices.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = buffer.at(indices[i]);
    b.s.row(i) = Eigen::Map<const nn::RowVector>(t.s.data(), w);
    b.s_next.row(i) = Eigen::Map<const nn::RowVector>(t.s_next.data(), w);
    b.a[i] = t.a;
    b.r[i] = t.r;
  }
  return b;
}

TdBatch make_batch(std::span<const Transition> transitions) {
  TdBatch b;
  if (transitions.empty()) return b;
  const auto w = static_cast<Eigen::Index>(transitions[0].s.size());
  const auto n = static_cast<Eigen::Index>(transitions.size());
  b.s.resize(n, w);
  b.s_next.resize(n, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[i];
    b.s.row(i) = Eigen::Map<const nn::RowVector>(t.s.data(), w);
    b.s_next.row(i) = Eigen::Map<const nn::RowVector>(t.s_next.data(), w);
    b.a.push_back(t.a);
    b.r.push_back(t.r);
  }
  return b;
}

TdResult td_loss_and_grad(const nn::ParamVector& params, const nn::ParamVector& target,
                          const nn::MlpSpec& spec, const TdBatch& batch, double gamma) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) return {0.0, nn::ParamVector(params.shapes())};

  nn::ForwardCache cache;
  const nn::Matrix q = nn::forward_batch(params, spec, batch.s, &cache);
  const nn::Matrix q_next = nn::forward_batch(target, spec, batch.s_next);

  nn::Matrix upstream = nn::Matrix::Zero(n, q.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = batch.r[i] + gamma * q_next.row(i).maxCoeff();
    const double diff = q(i, batch.a[i]) - y;
    loss += diff * diff;
    upstream(i, batch.a[i]) = 2.0 * diff / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  return {loss, nn::backward_batch(params, spec, cache, upstream)};
}

int greedy_action(std::span<const double> q) {
  if (q.empty()) throw ShapeError("greedy_action: empty Q vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

DqnAgent::DqnAgent(AgentConfig config, int state_width, std::uint64_t seed, int index)
    : config_(std::move(config)),
      index_(index),
      rng_(make_rng(seed, Stream::kClient, static_cast<std::uint64_t>(index))),
      buffer_(static_cast<std::size_t>(config_.buffer_capacity)),
      lr_(config_.lr) {
  config_.validate();
  spec_.widths.push_back(state_width);
  spec_.widths.insert(spec_.widths.end(), config_.hidden.begin(), config_.hidden.end());
  spec_.widths.push_back(radio::kActionCount);
  spec_.validate();
  // Every agent starts from the same initial model, as if it had received a
  // first global broadcast.
  Rng init = make_rng(seed, Stream::kModelInit);
  params_ = nn::init_params(spec_, init, index);
  target_ = params_;
}

void DqnAgent::set_params(const nn::ParamVector& p) {
  nn::require_same_shape(params_, p, "DqnAgent::set_params");
  const int id = params_.id();
  params_ = p;
  params_.set_id(id);
}

std::vector<double> DqnAgent::q_values(std::span<const double> s) const {
  return nn::mlp_forward(params_, spec_, s);
}

int DqnAgent::select_action(std::span<const double> s) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool warming = config_.random_warmup &&
                       buffer_.size() < static_cast<std::size_t>(std::max(0, config_.warmup_transitions));
  if (u(rng_) < config_.epsilon || warming) {
    std::uniform_int_distribution<int> pick(0, radio::kActionCount - 1);
    return pick(rng_);
  }
  return greedy_action(q_values(s));
}

TdBatch DqnAgent::sample_batch() {
  if (buffer_.size() < static_cast<std::size_t>(std::max(1, config_.warmup_transitions))) return {};
  const auto idx = buffer_.sample_indices(static_cast<std::size_t>(config_.batch), rng_);
  return make_batch(buffer_, idx);
}

UpdateReport DqnAgent::td_update(const TdBatch& batch) {
  if (batch.size() == 0) return {true, 0.0};
  TdResult r = td_loss_and_grad(params_, target_, spec_, batch, config_.gamma);
  apply_gradient(std::move(r.grad));
  return {false, r.loss};
}

double DqnAgent::lr_at(int episode) const { return config_.lr * std::pow(config_.lr_decay, episode); }

void DqnAgent::apply_gradient(nn::ParamVector grad) {
  nn::clip_grad_norm(grad, config_.grad_clip);
  params_.axpy(-lr_, grad);
  if (!params_.all_finite()) throw NumericError("agent " + std::to_string(index_) + ": non-finite parameters");
  count_update();
}

void DqnAgent::count_update() {
  ++updates_;
  if (updates_ % config_.target_sync_ttis == 0) sync_target();
}

}  // namespace fedsleep::agent
