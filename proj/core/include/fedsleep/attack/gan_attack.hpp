#pragma once

#include <cstddef>
#include <vector>

#include "fedsleep/common/rng.hpp"
#include "fedsleep/nn/autoencoder.hpp"
#include "fedsleep/nn/mlp.hpp"
#include "fedsleep/nn/optim.hpp"

namespace fedsleep::attack {

struct GanConfig {
  int warmup_samples = 64;
  std::vector<int> gen_hidden{128, 128};
  std::vector<int> disc_hidden{128, 128};
  int latent_width = 16;
  double lr = 1e-3;
  double train_mu = 0.0, train_sigma = 1.0;
  double attack_mu = 0.5, attack_sigma = 1.0;
  int pretrain_epochs = 200;
  int train_steps = 200;          // alternating steps once the bank is full
  int steps_per_round = 5;        // further steps every round while attacking
  int batch = 32;
};

enum class GanPhase { kCollecting, kTraining, kAttacking };

struct GanLosses {
  double disc = 0.0;
  double gen = 0.0;
};

/// Discriminator loss  -mean log D(x) - mean log(1 - D(G(z))) with D = sigmoid
/// of the network logit. Gradient with respect to the discriminator.
double disc_loss_and_grad(const nn::ParamVector& disc, const nn::MlpSpec& disc_spec, const nn::Matrix& real,
                          const nn::Matrix& fake, nn::ParamVector* grad);

/// Generator loss  mean log(1 - D(G(z))). Gradient with respect to the
/// generator.
double gen_loss_and_grad(const nn::ParamVector& gen, const nn::MlpSpec& gen_spec, const nn::ParamVector& disc,
                         const nn::MlpSpec& disc_spec, const nn::Matrix& z, nn::ParamVector* grad);

/// Generator of fake output-layer blocks. Real samples are the output-layer
/// block (final weights and biases) of each received global model.
class GanAttacker {
 public:
  GanAttacker(GanConfig config, std::size_t block_width, Rng rng);

  GanPhase phase() const { return phase_; }
  const GanConfig& config() const { return config_; }
  const nn::MlpSpec& gen_spec() const { return gen_spec_; }
  const nn::MlpSpec& disc_spec() const { return disc_spec_; }
  const nn::ParamVector& generator() const { return gen_; }
  const nn::ParamVector& discriminator() const { return disc_; }
  std::size_t bank_size() const { return bank_.size(); }
  const std::vector<std::vector<double>>& bank() const { return bank_; }
  bool failed() const { return failed_; }

  /// Adds a real block to the bank.
  void add_sample(std::vector<double> block);

  /// Collects the output layer of `global`, then advances the phase: once the
  /// bank holds warmup_samples, pretrains, trains and starts attacking.
  /// Returns the losses of the last training step taken (zeros when none).
  GanLosses observe_global(const std::vector<double>& output_block);

  /// Fixes the per-coordinate bank centre and scale, trains an autoencoder on
  /// the standardized bank and copies its decoder into the generator.
  /// Returns {loss before, loss after} in standardized units.
  std::pair<double, double> pretrain();

  /// One alternating discriminator / generator step. Sets failed() and
  /// returns NaN losses on numeric failure.
  GanLosses train_step();
  GanLosses train_step(const nn::Matrix& real, const nn::Matrix& z_disc, const nn::Matrix& z_gen);

  /// A fresh fake block from attack noise, in the units of the bank.
  std::vector<double> generate();

  /// Copy of `received_global` with its final layer replaced by a fake block.
  nn::ParamVector generate_malicious_update(const nn::ParamVector& received_global);

  nn::Matrix sample_noise(int rows, double mu, double sigma);

  /// Rows mapped to the units the generator works in; identity before pretrain.
  nn::Matrix standardize(const nn::Matrix& x) const;

 private:
  static constexpr double kMinScale = 1e-6;
  GanConfig config_;
  std::size_t block_width_;
  Rng rng_;
  nn::MlpSpec gen_spec_, disc_spec_;
  nn::ParamVector gen_, disc_;
  nn::Adam gen_opt_, disc_opt_;
  std::vector<std::vector<double>> bank_;
  Eigen::RowVectorXd centre_, scale_;
  GanPhase phase_ = GanPhase::kCollecting;
  bool failed_ = false;
};

}  // namespace fedsleep::attack
