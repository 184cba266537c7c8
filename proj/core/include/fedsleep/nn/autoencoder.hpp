#pragma once

#include <vector>

#include "fedsleep/common/rng.hpp"
#include "fedsleep/nn/mlp.hpp"
#include "fedsleep/nn/optim.hpp"

namespace fedsleep::nn {

/// Encoder: input -> hidden... -> latent (linear code).
/// Decoder: latent -> reversed hidden... -> input (linear output).
struct AutoencoderSpec {
  int input_width = 0;
  std::vector<int> hidden;
  int latent_width = 0;

  MlpSpec encoder_spec() const;
  MlpSpec decoder_spec() const;
};

/// Dense autoencoder trained on mean squared reconstruction error
/// L = mean over samples and coordinates of (x - dec(enc(x)))^2.
class Autoencoder {
 public:
  Autoencoder(AutoencoderSpec spec, Rng& rng);

  const AutoencoderSpec& spec() const { return spec_; }
  const ParamVector& encoder() const { return encoder_; }
  const ParamVector& decoder() const { return decoder_; }
  ParamVector& encoder() { return encoder_; }
  ParamVector& decoder() { return decoder_; }

  Matrix reconstruct(const Matrix& x) const;
  double loss(const Matrix& x) const;

  /// Loss plus gradients for both halves.
  double loss_and_grad(const Matrix& x, ParamVector& encoder_grad, ParamVector& decoder_grad) const;

  /// Full-batch Adam for `epochs` steps; returns the final loss.
  double train(const Matrix& x, int epochs, double lr);

  /// Per-row Euclidean reconstruction error ||x - dec(enc(x))||_2.
  std::vector<double> reconstruction_errors(const Matrix& x) const;

 private:
  AutoencoderSpec spec_;
  MlpSpec enc_spec_, dec_spec_;
  ParamVector encoder_, decoder_;
};

}  // namespace fedsleep::nn
