#pragma once

#include "fedsleep/agent/dqn.hpp"
#include "fedsleep/nn/mlp.hpp"

namespace fedsleep::attack {

/// Malicious local objective.
///  kAscent:     climb (Q(s,a) - y)^2, pulled toward the global model.
///  kComplement: descend (Q(s,a) + y)^2, so Q learns the negated return and
///               the greedy action becomes the worst one.
/// Both use y = r + gamma max_a' Q(s', a'; target) held fixed, and the
/// proximal term omega ||theta - theta_global||^2.
enum class RegObjective { kAscent, kComplement };

struct RegStep {
  nn::ParamVector params;
  double td_loss = 0.0;  // ordinary (Q - y)^2 batch mean before the step
};

/// One malicious step:
///   theta' = theta - alpha (s g_td) - 2 omega alpha (theta - theta_global)
/// with s g_td = -grad (Q - y)^2 for kAscent and +grad (Q + y)^2 for
/// kComplement. `clip` bounds the norm of the TD part (0 disables).
RegStep regularized_malicious_update(const nn::ParamVector& local, const nn::ParamVector& global,
                                     const nn::ParamVector& target, const nn::MlpSpec& spec,
                                     const agent::TdBatch& batch, double gamma, double omega, double alpha,
                                     RegObjective objective = RegObjective::kAscent, double clip = 0.0);

/// Batch mean of (Q(s,a) + y)^2 and its gradient (target held fixed).
agent::TdResult complement_loss_and_grad(const nn::ParamVector& params, const nn::ParamVector& target,
                                         const nn::MlpSpec& spec, const agent::TdBatch& batch, double gamma);

}  // namespace fedsleep::attack
