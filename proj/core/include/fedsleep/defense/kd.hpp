#pragma once

#include "fedsleep/agent/dqn.hpp"

namespace fedsleep::defense {

struct KdConfig {
  double theta = 0.05;  // KL threshold
  double xi = 0.8;      // TD share of the mixed local loss
};

/// Batch mean of KL(softmax(q_from) || softmax(q_to)) over the rows.
double mean_kl(const nn::Matrix& q_from, const nn::Matrix& q_to);

/// Mixed local loss  xi * TD + (1 - xi) * mean KL(p_meme || p_local)  and its
/// gradient with respect to the local parameters.
agent::TdResult mixed_loss_and_grad(const nn::ParamVector& local, const nn::ParamVector& target,
                                    const nn::ParamVector& meme, const nn::MlpSpec& spec,
                                    const agent::TdBatch& batch, double gamma, double xi);

/// Meme loss  mean KL(p_local || p_meme)  and its gradient with respect to the
/// meme parameters.
agent::TdResult meme_loss_and_grad(const nn::ParamVector& meme, const nn::ParamVector& local,
                                   const nn::MlpSpec& spec, const agent::TdBatch& batch);

struct KdReport {
  double kl = 0.0;               // mean KL(p_meme || p_local) before the step
  bool local_distills = false;   // true: local took the mixed loss, meme untouched
  double loss = 0.0;
};

/// One KD step on `batch`. Below the threshold the local model trains on the
/// mixed loss; otherwise the local model takes a plain TD step and the meme
/// distils from the local model. Both steps use learning rate `alpha` and the
/// global-norm clip `clip` (0 disables).
KdReport kd_local_update(nn::ParamVector& local, nn::ParamVector& meme, const nn::ParamVector& target,
                         const nn::MlpSpec& spec, const agent::TdBatch& batch, double gamma,
                         const KdConfig& config, double alpha, double clip = 0.0);

}  // namespace fedsleep::defense
