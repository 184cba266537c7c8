#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsleep/agent/replay_buffer.hpp"
#include "fedsleep/common/rng.hpp"
#include "fedsleep/nn/mlp.hpp"

namespace fedsleep::agent {

struct AgentConfig {
  double lr = 0.01;
  /// Per-episode multiplicative learning-rate decay; 1 keeps lr constant.
  double lr_decay = 1.0;
  double gamma = 0.8;
  double epsilon = 0.05;
  int batch = 256;
  std::vector<int> hidden{64, 32};
  int target_sync_ttis = 100;
  int buffer_capacity = 4096;
  /// Updates start once the buffer holds this many transitions; until then
  /// actions are uniform random when `random_warmup` is set.
  int warmup_transitions = 32;
  bool random_warmup = true;
  /// Global-norm gradient clip; 0 disables.
  double grad_clip = 10.0;

  void validate() const;
};

/// Batch in matrix form, one transition per row.
struct TdBatch {
  nn::Matrix s;
  std::vector<int> a;
  std::vector<double> r;
  nn::Matrix s_next;

  std::size_t size() const { return a.size(); }
};

TdBatch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices);
TdBatch make_batch(std::span<const Transition> transitions);

struct TdResult {
  double loss = 0.0;
  nn::ParamVector grad;
};

/// Mean over the batch of (r + gamma max_a' Q(s', a'; target) - Q(s, a; params))^2
/// and its gradient with respect to `params` (the target is held fixed).
TdResult td_loss_and_grad(const nn::ParamVector& params, const nn::ParamVector& target,
                          const nn::MlpSpec& spec, const TdBatch& batch, double gamma);

/// Lowest index among the maxima.
int greedy_action(std::span<const double> q);

struct UpdateReport {
  bool skipped = false;  // set when the batch was empty
  double loss = 0.0;
};

class DqnAgent {
 public:
  /// `seed` and `index` select the agent's exploration, sampling and init
  /// streams.
  DqnAgent(AgentConfig config, int state_width, std::uint64_t seed, int index);

  const AgentConfig& config() const { return config_; }
  const nn::MlpSpec& spec() const { return spec_; }
  int index() const { return index_; }

  const nn::ParamVector& params() const { return params_; }
  nn::ParamVector& params() { return params_; }
  const nn::ParamVector& target() const { return target_; }
  void sync_target() { target_ = params_; }

  /// Replaces the online parameters (the target network is left alone).
  void set_params(const nn::ParamVector& p);

  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  Rng& rng() { return rng_; }

  std::vector<double> q_values(std::span<const double> s) const;
  /// Epsilon-greedy, or uniform random while the buffer is still warming up.
  int select_action(std::span<const double> s);

  /// Samples a batch from the buffer, or an empty batch before warmup.
  TdBatch sample_batch();

  /// One SGD step on the TD loss of `batch`, then the periodic target sync.
  UpdateReport td_update(const TdBatch& batch);

  /// Learning rate in effect for `episode` (0-based).
  double lr_at(int episode) const;
  void set_episode(int episode) { lr_ = lr_at(episode); }
  double lr() const { return lr_; }

  /// Clips `grad` and applies params -= lr * grad, counting one update.
  void apply_gradient(nn::ParamVector grad);

  /// Counts an update made outside td_update and runs the periodic target sync.
  void count_update();

  std::int64_t updates() const { return updates_; }

 private:

  AgentConfig config_;
  nn::MlpSpec spec_;
  int index_;
  Rng rng_;
  nn::ParamVector params_, target_;
  ReplayBuffer buffer_;
  std::int64_t updates_ = 0;
  double lr_ = 0.0;
};

}  // namespace fedsleep::agent
