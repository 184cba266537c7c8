#include "fedsleep/nn/autoencoder.hpp"

#include <cmath>

namespace fedsleep::nn {

MlpSpec AutoencoderSpec::encoder_spec() const {
  MlpSpec s;
  s.widths.push_back(input_width);
  for (int h : hidden) s.widths.push_back(h);
  s.widths.push_back(latent_width);
  return s;
}

MlpSpec AutoencoderSpec::decoder_spec() const {
  MlpSpec s;
  s.widths.push_back(latent_width);
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) s.widths.push_back(*it);
  s.widths.push_back(input_width);
  return s;
}

Autoencoder::Autoencoder(AutoencoderSpec spec, Rng& rng)
    : spec_(std::move(spec)),
      enc_spec_(spec_.encoder_spec()),
      dec_spec_(spec_.decoder_spec()),
      encoder_(init_params(enc_spec_, rng)),
      decoder_(init_params(dec_spec_, rng)) {}

Matrix Autoencoder::reconstruct(const Matrix& x) const {
  return forward_batch(decoder_, dec_spec_, forward_batch(encoder_, enc_spec_, x));
}

double Autoencoder::loss(const Matrix& x) const {
  const Matrix r = reconstruct(x) - x;
  return r.squaredNorm() / static_cast<double>(x.size());
}

double Autoencoder::loss_and_grad(const Matrix& x, ParamVector& encoder_grad,
                                  ParamVector& decoder_grad) const {
  ForwardCache enc_cache, dec_cache;
  const Matrix code = forward_batch(encoder_, enc_spec_, x, &enc_cache);
  const Matrix out = forward_batch(decoder_, dec_spec_, code, &dec_cache);
  const Matrix diff = out - x;
  const double n = static_cast<double>(x.size());
  const Matrix upstream = (2.0 / n) * diff;
  Matrix code_grad;
  decoder_grad = backward_batch(decoder_, dec_spec_, dec_cache, upstream, &code_grad);
  encoder_grad = backward_batch(encoder_, enc_spec_, enc_cache, code_grad);
  return diff.squaredNorm() / n;
}

double Autoencoder::train(const Matrix& x, int epochs, double lr) {
  Adam enc_opt(lr), dec_opt(lr);
  ParamVector ge, gd;
  for (int e = 0; e < epochs; ++e) {
    loss_and_grad(x, ge, gd);
    enc_opt.step(encoder_, ge);
    dec_opt.step(decoder_, gd);
  }
  return loss(x);
}

std::vector<double> Autoencoder::reconstruction_errors(const Matrix& x) const {
  const Matrix r = reconstruct(x) - x;
  std::vector<double> errors(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) errors[static_cast<std::size_t>(i)] = r.row(i).norm();
  return errors;
}

}  // namespace fedsleep::nn
